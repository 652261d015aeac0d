from .buffers import RenderBuffers, load_depth_bin, load_face_id_png
from .camera import (
    DEFAULT_PERTURBATION_DEG,
    MAIN_AXIS_ORDER,
    OrthoCamera,
    ViewSpec,
    camera_for_view,
)
from .palette import PALETTE_PERIOD, decode_face_ids, face_color, palette_for
from .renderer import (
    ENV_BACKEND,
    active_backend,
    render,
    render_bruteforce,
    visible_pixel_count,
)

__all__ = [
    "RenderBuffers",
    "load_depth_bin",
    "load_face_id_png",
    "DEFAULT_PERTURBATION_DEG",
    "MAIN_AXIS_ORDER",
    "OrthoCamera",
    "ViewSpec",
    "camera_for_view",
    "PALETTE_PERIOD",
    "decode_face_ids",
    "face_color",
    "palette_for",
    "ENV_BACKEND",
    "active_backend",
    "render",
    "render_bruteforce",
    "visible_pixel_count",
]
