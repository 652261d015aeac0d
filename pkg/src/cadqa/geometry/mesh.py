"""Core mesh types: faces, adjacency graph, bounding box, CadModel.

All coordinates are stored in millimeters. A CadModel is immutable after
load; renderer and pipeline caches key off object identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import UnknownFace

# Vertices closer than this fraction of the bounding-box diagonal are welded.
WELD_EPSILON_REL = 1e-6


@dataclass(frozen=True)
class Aabb:
    """Axis-aligned bounding box, min/max corners in mm."""

    min: np.ndarray
    max: np.ndarray

    @property
    def extents(self) -> np.ndarray:
        return self.max - self.min

    @property
    def center(self) -> np.ndarray:
        return (self.min + self.max) * 0.5

    @property
    def diagonal(self) -> float:
        return float(np.linalg.norm(self.max - self.min))

    @staticmethod
    def of_points(points: np.ndarray) -> "Aabb":
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        return Aabb(pts.min(axis=0), pts.max(axis=0))


@dataclass(frozen=True)
class Face:
    """One B-rep face: a dense id plus the triangles that tessellate it."""

    id: int
    triangles: np.ndarray  # (k, 3) int32 vertex indices
    total_area: float  # mm^2


class AdjacencyGraph:
    """Face neighborhood by shared (welded) edge. Symmetric, irreflexive."""

    def __init__(self, neighbors: dict[int, frozenset[int]]):
        self.neighbors = neighbors

    def neighbors_of(self, face_id: int) -> frozenset[int]:
        return self.neighbors.get(face_id, frozenset())

    def component(self, seed: int, allowed: frozenset[int] | set[int]) -> frozenset[int]:
        """Connected component containing ``seed``, restricted to ``allowed``."""
        if seed not in allowed:
            return frozenset()
        seen = {seed}
        stack = [seed]
        while stack:
            fid = stack.pop()
            for nb in self.neighbors_of(fid):
                if nb in allowed and nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return frozenset(seen)

    def components(self, subset: set[int] | frozenset[int]) -> list[frozenset[int]]:
        """Partition ``subset`` into connected components, ordered by min id."""
        remaining = set(subset)
        out = []
        while remaining:
            seed = min(remaining)
            comp = self.component(seed, remaining)
            remaining -= comp
            out.append(comp)
        return sorted(out, key=min)


@dataclass(eq=False)
class CadModel:
    """Face-segmented triangle mesh with adjacency, in canonical mm."""

    vertices: np.ndarray  # (V, 3) float64, mm
    faces: list[Face]
    adjacency: AdjacencyGraph
    aabb: Aabb
    source_path: str
    labels: dict[str, list[int]] = field(default_factory=dict)
    # Flattened triangle arrays shared by renderer and metrics.
    triangles: np.ndarray = field(default=None, repr=False)  # (T, 3) int32
    tri_face: np.ndarray = field(default=None, repr=False)  # (T,) int32

    def __post_init__(self):
        if self.triangles is None:
            tris = [f.triangles for f in self.faces]
            object.__setattr__(self, "triangles", np.vstack(tris).astype(np.int32))
        if self.tri_face is None:
            owner = np.concatenate(
                [np.full(len(f.triangles), f.id, dtype=np.int32) for f in self.faces]
            )
            object.__setattr__(self, "tri_face", owner)
        self._cache: dict = {}

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def n_triangles(self) -> int:
        return int(self.triangles.shape[0])

    def face(self, face_id: int) -> Face:
        if not 0 <= face_id < len(self.faces):
            raise UnknownFace(f"face {face_id} not in model ({len(self.faces)} faces)")
        return self.faces[face_id]

    def face_vertex_ids(self, face_ids) -> np.ndarray:
        """Unique welded vertex ids used by the given faces."""
        tri = np.vstack([self.face(f).triangles for f in sorted(face_ids)])
        return np.unique(tri)


def triangle_areas(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Area of each triangle in mm^2."""
    a = vertices[triangles[:, 0]]
    b = vertices[triangles[:, 1]]
    c = vertices[triangles[:, 2]]
    cross = np.cross(b - a, c - a)
    return 0.5 * np.linalg.norm(cross, axis=1)


def face_visible_area(face: Face) -> float:
    """Total tessellated area of the face in mm^2."""
    return face.total_area


def model_aabb(model: CadModel) -> Aabb:
    """Recompute the bounding box from the vertex array (exact)."""
    return Aabb.of_points(model.vertices)


def build_adjacency(triangles: np.ndarray, tri_face: np.ndarray) -> AdjacencyGraph:
    """Two faces are neighbors iff they share at least one undirected edge.

    Operates on welded vertex ids; the shared-edge rule (not shared-vertex)
    keeps corner-touching faces apart so component pruning stays meaningful.
    """
    tris = np.asarray(triangles, dtype=np.int64)
    nverts = int(tris.max()) + 1 if tris.size else 0
    edges = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    edges.sort(axis=1)
    owner = np.concatenate([tri_face, tri_face, tri_face]).astype(np.int64)
    keys = edges[:, 0] * nverts + edges[:, 1]
    # Distinct (edge, face) incidences; a face touching its own edge twice
    # must not self-connect.
    pair = np.unique(np.stack([keys, owner], axis=1), axis=0)
    keys, owner = pair[:, 0], pair[:, 1]

    neighbors: dict[int, set[int]] = {}
    boundaries = np.flatnonzero(np.diff(keys)) + 1
    starts = np.concatenate([[0], boundaries])
    ends = np.concatenate([boundaries, [len(keys)]])
    for s, e in zip(starts, ends):
        if e - s < 2:
            continue
        group = owner[s:e]
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                a, b = int(group[i]), int(group[j])
                neighbors.setdefault(a, set()).add(b)
                neighbors.setdefault(b, set()).add(a)
    frozen = {fid: frozenset(nbs) for fid, nbs in neighbors.items()}
    return AdjacencyGraph(frozen)
