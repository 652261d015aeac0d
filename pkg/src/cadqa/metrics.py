"""Part measurements in world coordinates (mm).

Centers and extents come from the part's axis-aligned bounding box; the
full-extents convention applies throughout. Radius/axis/depth come from a
closed-form cylinder estimator: wall normals of a cylinder span the plane
orthogonal to its axis, so the axis is the least-variance direction of the
triangle normals, and the radius is the mean vertex distance from the axis
line through the vertex centroid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TooFewVertices
from .geometry import CadModel
from .segment import PartInstance

# Tessellated cylinders stay well under this relative spread of radial
# distances; boxes and planes land far above it.
MAX_RADIAL_RSD = 0.05

MIN_FIT_VERTICES = 8


@dataclass(frozen=True)
class CylinderFit:
    axis: np.ndarray  # unit vector
    radius: float  # mm
    depth: float  # mm, extent along the axis


@dataclass(frozen=True)
class PartMeasurements:
    center: np.ndarray  # mm
    extents: np.ndarray  # full lengths along world axes, mm
    face_area_total: float  # mm^2
    radius: float | None = None
    diameter: float | None = None
    axis: np.ndarray | None = None
    depth: float | None = None

    def to_json(self) -> dict:
        return {
            "center": [float(x) for x in self.center],
            "extents": [float(x) for x in self.extents],
            "face_area_total": self.face_area_total,
            "radius": self.radius,
            "diameter": self.diameter,
            "axis": None if self.axis is None else [float(x) for x in self.axis],
            "depth": self.depth,
        }


def _part_vertices(model: CadModel, part: PartInstance) -> np.ndarray:
    ids = model.face_vertex_ids(part.face_ids)
    return model.vertices[ids]


def part_extents(model: CadModel, part: PartInstance) -> np.ndarray:
    """Componentwise max-min over the part's vertices (full extents)."""
    pts = _part_vertices(model, part)
    return pts.max(axis=0) - pts.min(axis=0)


def part_center(model: CadModel, part: PartInstance) -> np.ndarray:
    """Center of the part's axis-aligned bounding box.

    The AABB center is tessellation-independent, unlike a vertex centroid.
    """
    pts = _part_vertices(model, part)
    return (pts.max(axis=0) + pts.min(axis=0)) * 0.5


def fit_cylinder(model: CadModel, part: PartInstance) -> CylinderFit | None:
    """Estimate cylinder axis/radius/depth; None when not cylindrical."""
    pts = _part_vertices(model, part)
    if len(pts) < MIN_FIT_VERTICES:
        raise TooFewVertices(
            f"cylinder fit needs >= {MIN_FIT_VERTICES} vertices, got {len(pts)}")

    tri_ids = np.vstack([model.face(f).triangles for f in sorted(part.face_ids)])
    a = model.vertices[tri_ids[:, 0]]
    b = model.vertices[tri_ids[:, 1]]
    c = model.vertices[tri_ids[:, 2]]
    normals = np.cross(b - a, c - a)
    lengths = np.linalg.norm(normals, axis=1)
    normals = normals[lengths > 0] / lengths[lengths > 0, None]
    if len(normals) < 2:
        return None

    centered = normals - normals.mean(axis=0)
    cov = centered.T @ centered / len(normals)
    eigvals, eigvecs = np.linalg.eigh(cov)
    axis = eigvecs[:, 0]  # eigh sorts eigenvalues ascending
    # Deterministic orientation: biggest component positive.
    lead = int(np.argmax(np.abs(axis)))
    if axis[lead] < 0:
        axis = -axis

    centroid = pts.mean(axis=0)
    rel = pts - centroid
    along = rel @ axis
    radial = np.linalg.norm(rel - along[:, None] * axis[None, :], axis=1)
    radius = float(radial.mean())
    if radius <= 0.0 or float(radial.std()) / radius > MAX_RADIAL_RSD:
        return None
    depth = float(along.max() - along.min())
    return CylinderFit(axis=axis, radius=radius, depth=depth)


def measure_part(model: CadModel, part: PartInstance) -> PartMeasurements:
    """All measurements for one part; cylinder fields absent when the fit fails."""
    pts = _part_vertices(model, part)
    center = (pts.max(axis=0) + pts.min(axis=0)) * 0.5
    extents = pts.max(axis=0) - pts.min(axis=0)
    area = sum(model.face(f).total_area for f in part.face_ids)
    try:
        fit = fit_cylinder(model, part)
    except TooFewVertices:
        fit = None
    if fit is None:
        return PartMeasurements(center=center, extents=extents, face_area_total=area)
    return PartMeasurements(
        center=center, extents=extents, face_area_total=area,
        radius=fit.radius, diameter=2.0 * fit.radius, axis=fit.axis,
        depth=fit.depth)
