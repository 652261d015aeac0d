"""Orthographic renderer with pluggable ray-casting backend.

The numba kernel is the default; set CADQUERY_KERNELS=numpy to force the
pure-numpy fallback. Both backends traverse the same BVH and produce
identical buffers. render() is pure: concurrent renders over a shared
immutable model are safe.
"""

from __future__ import annotations

import os

import numpy as np

from ..errors import UnknownFace
from ..geometry import CadModel
from . import bruteforce, kernels_numpy
from .buffers import RenderBuffers
from .bvh import build_bvh
from .camera import OrthoCamera
from .palette import palette_for

ENV_BACKEND = "CADQUERY_KERNELS"
_BACKENDS = ("numba", "numpy")


def active_backend() -> str:
    """Backend selected by env flag, defaulting to numba when importable."""
    forced = os.environ.get(ENV_BACKEND)
    if forced:
        if forced not in _BACKENDS:
            raise ValueError(f"{ENV_BACKEND} must be one of {_BACKENDS}")
        return forced
    try:
        from . import kernels_numba  # noqa: F401
        return "numba"
    except ImportError:
        return "numpy"


def _model_arrays(model: CadModel) -> dict:
    """Per-model precomputed triangle soup + BVH, cached on the model."""
    cached = model._cache.get("render_arrays")
    if cached is not None:
        return cached
    tri = model.triangles.astype(np.int64)
    a = model.vertices[tri[:, 0]]
    b = model.vertices[tri[:, 1]]
    c = model.vertices[tri[:, 2]]
    e1 = b - a
    e2 = c - a
    arrays = {
        "ax": np.ascontiguousarray(a[:, 0]), "ay": np.ascontiguousarray(a[:, 1]),
        "az": np.ascontiguousarray(a[:, 2]),
        "e1x": np.ascontiguousarray(e1[:, 0]), "e1y": np.ascontiguousarray(e1[:, 1]),
        "e1z": np.ascontiguousarray(e1[:, 2]),
        "e2x": np.ascontiguousarray(e2[:, 0]), "e2y": np.ascontiguousarray(e2[:, 1]),
        "e2z": np.ascontiguousarray(e2[:, 2]),
        "bvh": build_bvh(model.vertices, model.triangles),
        "palette": palette_for(model.n_faces),
    }
    model._cache["render_arrays"] = arrays
    return arrays


def _buffers_from_hits(model: CadModel, camera: OrthoCamera, palette,
                       tri_hit: np.ndarray, t_hit: np.ndarray) -> RenderBuffers:
    hit = tri_hit >= 0
    face_id = np.where(hit, model.tri_face[np.where(hit, tri_hit, 0)], -1).astype(np.int32)
    depth = np.where(hit, t_hit, np.inf)
    color = np.zeros((camera.image_height, camera.image_width, 3), dtype=np.uint8)
    color[hit] = palette[face_id[hit]]
    return RenderBuffers(color=color, face_id=face_id, depth=depth,
                         camera=camera, n_faces=model.n_faces)


def render(model: CadModel, camera: OrthoCamera, backend: str | None = None) -> RenderBuffers:
    """Cast one ray per pixel; nearest triangle wins, ties to lowest index."""
    arrays = _model_arrays(model)
    bvh = arrays["bvh"]
    origin0, du, dv, direction = camera.ray_grid()
    w, h = camera.image_width, camera.image_height
    out_tri = np.full((h, w), -1, dtype=np.int32)
    out_t = np.full((h, w), np.inf)

    name = backend or active_backend()
    if name == "numba":
        from . import kernels_numba
        kernels_numba.cast_rays(
            origin0, du, dv, direction, w, h,
            bvh.nodes_min, bvh.nodes_max, bvh.node_left, bvh.node_right,
            bvh.node_count, bvh.tri_order,
            arrays["ax"], arrays["ay"], arrays["az"],
            arrays["e1x"], arrays["e1y"], arrays["e1z"],
            arrays["e2x"], arrays["e2y"], arrays["e2z"],
            out_tri, out_t)
    elif name == "numpy":
        kernels_numpy.cast_rays(
            origin0, du, dv, direction, w, h,
            bvh.nodes_min, bvh.nodes_max, bvh.node_left, bvh.node_right,
            bvh.node_count, bvh.tri_order,
            arrays["ax"], arrays["ay"], arrays["az"],
            arrays["e1x"], arrays["e1y"], arrays["e1z"],
            arrays["e2x"], arrays["e2y"], arrays["e2z"],
            out_tri, out_t)
    else:
        raise ValueError(f"unknown backend {name!r}")
    return _buffers_from_hits(model, camera, arrays["palette"], out_tri, out_t)


def render_bruteforce(model: CadModel, camera: OrthoCamera) -> RenderBuffers:
    """Oracle render: all-pairs ray/triangle tests, no spatial index."""
    arrays = _model_arrays(model)
    origin0, du, dv, direction = camera.ray_grid()
    tri_hit, t_hit = bruteforce.cast_rays(
        origin0, du, dv, direction, camera.image_width, camera.image_height,
        arrays["ax"], arrays["ay"], arrays["az"],
        arrays["e1x"], arrays["e1y"], arrays["e1z"],
        arrays["e2x"], arrays["e2y"], arrays["e2z"])
    return _buffers_from_hits(model, camera, arrays["palette"], tri_hit, t_hit)


def visible_pixel_count(buffers: RenderBuffers, face_id: int) -> int:
    """Exact pixel count of one face in the face-id buffer."""
    if not 0 <= face_id < buffers.n_faces:
        raise UnknownFace(f"face {face_id} not in model ({buffers.n_faces} faces)")
    return int(np.count_nonzero(buffers.face_id == face_id))
