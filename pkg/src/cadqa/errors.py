"""Exception hierarchy shared across the engine."""


class CadqaError(Exception):
    """Base class for all engine errors."""


# -- mesh loading ------------------------------------------------------------

class MalformedMesh(CadqaError):
    """Input file cannot be interpreted as a face-grouped triangle mesh."""


class EmptyModel(CadqaError):
    """Mesh file contains no face groups."""


class EmptyFace(CadqaError):
    """A face group declares no (or only degenerate) triangles."""


# -- rendering ---------------------------------------------------------------

class DegenerateModel(CadqaError):
    """Model bounding box has zero diagonal; no camera can frame it."""


class UnknownFace(CadqaError):
    """Face id does not exist in the model."""


class PaletteOverflow(CadqaError):
    """More faces than the distinct-color palette can guarantee."""


# -- segmentation pipeline ---------------------------------------------------

class DimensionMismatch(CadqaError):
    """Mask and render buffers disagree on image dimensions."""


class ProviderUnavailable(CadqaError):
    """Segmentation provider failed; carries the view it failed on."""

    def __init__(self, message: str, view: str | None = None):
        super().__init__(message if view is None else f"{message} (view={view})")
        self.view = view


# -- part metrics ------------------------------------------------------------

class TooFewVertices(CadqaError):
    """Part has too few distinct vertices for a cylinder fit."""


# -- query language ----------------------------------------------------------

class QuerySyntaxError(CadqaError):
    """Parse failure; carries source position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class QueryTypeError(CadqaError):
    """Operation applied to values of the wrong type or unit."""


class UnknownPropertyError(CadqaError):
    """Program calls a function or property the API never defined."""


class CapabilityError(CadqaError):
    """Program asks for a capability the CAD interface does not support."""


class EvaluationTimeout(CadqaError):
    """Program exceeded its wall-clock budget."""


# -- question answering ------------------------------------------------------

class EndpointError(CadqaError):
    """Chat endpoint request failed (HTTP error, timeout, bad payload)."""


class NoCodeBlock(CadqaError):
    """LLM completion contains no fenced code block."""


class SuiteError(CadqaError):
    """Benchmark suite file is malformed or references missing models."""
