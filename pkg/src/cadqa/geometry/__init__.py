from .mesh import (
    Aabb,
    AdjacencyGraph,
    CadModel,
    Face,
    WELD_EPSILON_REL,
    build_adjacency,
    face_visible_area,
    model_aabb,
    triangle_areas,
)
from .objio import load_model, load_sidecar, save_model, sidecar_path

__all__ = [
    "Aabb",
    "AdjacencyGraph",
    "CadModel",
    "Face",
    "WELD_EPSILON_REL",
    "build_adjacency",
    "face_visible_area",
    "model_aabb",
    "triangle_areas",
    "load_model",
    "load_sidecar",
    "save_model",
    "sidecar_path",
]
