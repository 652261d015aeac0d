"""View specifications and orthographic cameras.

World convention (configurable per model suite, this is the default): +Z is
up, "top" looks along -Z. Main-axis views are perturbed by one degree so
faces orthogonal to the exact axis still show up; corner views sit at
azimuth 45+k*90 degrees and elevation +/-45 degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateModel
from ..geometry import CadModel

MAIN_AXIS_DIRECTIONS = {
    "top": (0.0, 0.0, -1.0),
    "bottom": (0.0, 0.0, 1.0),
    "front": (0.0, 1.0, 0.0),
    "back": (0.0, -1.0, 0.0),
    "left": (1.0, 0.0, 0.0),
    "right": (-1.0, 0.0, 0.0),
}

MAIN_AXIS_ORDER = ("top", "bottom", "left", "right", "front", "back")

FRAME_MARGIN = 1.05  # 5% margin on the dimension that limits the fit

DEFAULT_PERTURBATION_DEG = 1.0


@dataclass(frozen=True)
class ViewSpec:
    """Either a main-axis side or one of 8 corner octants."""

    kind: str  # one of MAIN_AXIS_DIRECTIONS keys, or "corner"
    octant: int = 0
    azimuth_perturbation_deg: float = DEFAULT_PERTURBATION_DEG

    def __post_init__(self):
        if self.kind == "corner":
            if not 0 <= self.octant <= 7:
                raise ValueError("corner octant must be 0..7")
            if self.azimuth_perturbation_deg != 0.0:
                raise ValueError("perturbation applies only to main-axis views")
        elif self.kind not in MAIN_AXIS_DIRECTIONS:
            raise ValueError(f"unknown view kind {self.kind!r}")

    @staticmethod
    def main_axis(side: str, perturbation_deg: float = DEFAULT_PERTURBATION_DEG) -> "ViewSpec":
        return ViewSpec(kind=side, azimuth_perturbation_deg=perturbation_deg)

    @staticmethod
    def corner(octant: int) -> "ViewSpec":
        return ViewSpec(kind="corner", octant=octant, azimuth_perturbation_deg=0.0)

    @staticmethod
    def parse(text: str) -> "ViewSpec":
        if text.startswith("corner:"):
            return ViewSpec.corner(int(text.split(":", 1)[1]))
        return ViewSpec.main_axis(text)

    @property
    def key(self) -> str:
        if self.kind == "corner":
            return f"corner:{self.octant}"
        return self.kind


@dataclass(frozen=True)
class OrthoCamera:
    view_direction: np.ndarray  # unit
    up: np.ndarray  # unit, orthogonal to view_direction
    image_width: int
    image_height: int
    world_units_per_pixel: float  # mm per pixel
    viewport_center: np.ndarray  # image center on the viewport plane, mm

    @property
    def right(self) -> np.ndarray:
        return np.cross(self.view_direction, self.up)

    def ray_grid(self):
        """(origin of pixel (0,0) center, du, dv, direction) for the kernels.

        Image rows grow downward, so dv runs against the camera up axis.
        """
        s = self.world_units_per_pixel
        du = s * self.right
        dv = -s * self.up
        origin0 = (
            self.viewport_center
            + (0.5 - self.image_width / 2.0) * du
            + (0.5 - self.image_height / 2.0) * dv
        )
        return origin0, du, dv, self.view_direction


def _rotate(v: np.ndarray, axis: np.ndarray, degrees: float) -> np.ndarray:
    """Rodrigues rotation of v about a unit axis."""
    rad = math.radians(degrees)
    c, s = math.cos(rad), math.sin(rad)
    return v * c + np.cross(axis, v) * s + axis * float(np.dot(axis, v)) * (1.0 - c)


def view_direction(view: ViewSpec) -> tuple[np.ndarray, np.ndarray]:
    """Unit view direction and up hint for a view."""
    if view.kind == "corner":
        azim = math.radians(45.0 + 90.0 * (view.octant % 4))
        elev = math.radians(45.0 if view.octant < 4 else -45.0)
        eye = np.array([
            math.cos(elev) * math.cos(azim),
            math.cos(elev) * math.sin(azim),
            math.sin(elev),
        ])
        return -eye, np.array([0.0, 0.0, 1.0])

    d = np.array(MAIN_AXIS_DIRECTIONS[view.kind], dtype=np.float64)
    pert = view.azimuth_perturbation_deg
    if pert != 0.0:
        if view.kind in ("top", "bottom"):
            # Azimuth spin is degenerate for vertical views; tilt instead.
            d = _rotate(d, np.array([0.0, 1.0, 0.0]), pert)
        else:
            d = _rotate(d, np.array([0.0, 0.0, 1.0]), pert)
        d /= np.linalg.norm(d)
    up_hint = np.array([0.0, 1.0, 0.0]) if view.kind in ("top", "bottom") \
        else np.array([0.0, 0.0, 1.0])
    return d, up_hint


def camera_for_view(model: CadModel, view: ViewSpec, width: int, height: int) -> OrthoCamera:
    """Frame the model's bounding box with a 5% margin.

    Deterministic for fixed inputs; the viewport plane sits strictly in
    front of the model so all hit depths are positive.
    """
    aabb = model.aabb
    diag = aabb.diagonal
    if diag == 0.0:
        raise DegenerateModel(f"{model.source_path}: zero-diagonal bounding box")

    d, up_hint = view_direction(view)
    r = np.cross(d, up_hint)
    r /= np.linalg.norm(r)
    u = np.cross(r, d)
    u /= np.linalg.norm(u)

    corners = np.array([
        [aabb.min[0] if i == 0 else aabb.max[0],
         aabb.min[1] if j == 0 else aabb.max[1],
         aabb.min[2] if k == 0 else aabb.max[2]]
        for i in (0, 1) for j in (0, 1) for k in (0, 1)
    ])
    proj_r = corners @ r
    proj_u = corners @ u
    span_r = float(proj_r.max() - proj_r.min())
    span_u = float(proj_u.max() - proj_u.min())
    scale = max(span_r * FRAME_MARGIN / width, span_u * FRAME_MARGIN / height)
    if scale == 0.0:
        raise DegenerateModel(f"{model.source_path}: model projects to a point")

    proj_d = corners @ d
    standoff = float(proj_d.min()) - 0.05 * diag - 1.0
    center = aabb.center
    viewport_center = center + (standoff - float(center @ d)) * d
    return OrthoCamera(
        view_direction=d,
        up=u,
        image_width=width,
        image_height=height,
        world_units_per_pixel=scale,
        viewport_center=viewport_center,
    )
