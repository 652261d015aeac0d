"""Measurement question answering over face-segmented CAD meshes."""

__version__ = "0.1.0"

from .geometry import CadModel, load_model, save_model

__all__ = ["CadModel", "load_model", "save_model", "__version__"]
