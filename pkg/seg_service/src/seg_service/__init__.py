"""Segmentation microservice speaking the segmentation wire protocol."""

__version__ = "0.1.0"

from .app import create_app
from .backends import ColorRegionBackend, GroundedVocabBackend, make_backend

__all__ = ["create_app", "ColorRegionBackend", "GroundedVocabBackend",
           "make_backend", "__version__"]
