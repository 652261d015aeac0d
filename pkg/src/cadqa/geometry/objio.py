"""Face-grouped OBJ input/output.

Format contract: each ``g <name>`` group is exactly one B-rep face, with
group names following the ``face_<id>`` convention. An optional sidecar
``<model>.meta.json`` declares units and ground-truth part labels.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from ..errors import EmptyFace, EmptyModel, MalformedMesh
from .mesh import (
    Aabb,
    CadModel,
    Face,
    WELD_EPSILON_REL,
    build_adjacency,
    triangle_areas,
)

UNIT_TO_MM = {"mm": 1.0, "m": 1000.0}

_FACE_NAME = re.compile(r"^face_(\d+)$")


def sidecar_path(path: Path) -> Path:
    return path.with_suffix(".meta.json")


def load_sidecar(path: Path) -> dict:
    meta_path = sidecar_path(path)
    if not meta_path.exists():
        return {}
    with open(meta_path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def load_model(path: str | Path, units: str | None = None) -> CadModel:
    """Load a face-grouped OBJ into a welded, adjacency-built CadModel.

    ``units`` overrides the sidecar declaration; default is mm. Vertices are
    welded at 1e-6 of the bounding-box diagonal, degenerate triangles are
    dropped, and non-triangle polygons are fan-triangulated.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))

    meta = load_sidecar(path)
    if units is None:
        units = meta.get("units", "mm")
    if units not in UNIT_TO_MM:
        raise MalformedMesh(f"unsupported unit {units!r}")
    scale = UNIT_TO_MM[units]

    raw_vertices: list[tuple[float, float, float]] = []
    groups: dict[str, list[list[int]]] = {}
    order: list[str] = []
    current: str | None = None

    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            tag = parts[0]
            if tag == "v":
                if len(parts) < 4:
                    raise MalformedMesh(f"line {lineno}: vertex needs 3 coordinates")
                try:
                    raw_vertices.append(tuple(float(p) for p in parts[1:4]))
                except ValueError as exc:
                    raise MalformedMesh(f"line {lineno}: bad vertex: {exc}") from exc
            elif tag == "g":
                if len(parts) < 2:
                    raise MalformedMesh(f"line {lineno}: group without a name")
                current = parts[1]
                if current not in groups:
                    groups[current] = []
                    order.append(current)
            elif tag == "f":
                if current is None:
                    raise MalformedMesh(f"line {lineno}: face outside any group")
                idx = []
                for token in parts[1:]:
                    head = token.split("/")[0]
                    try:
                        i = int(head)
                    except ValueError as exc:
                        raise MalformedMesh(f"line {lineno}: bad index {token!r}") from exc
                    if i < 0:
                        i = len(raw_vertices) + 1 + i
                    if not 1 <= i <= len(raw_vertices):
                        raise MalformedMesh(f"line {lineno}: vertex index {i} out of range")
                    idx.append(i - 1)
                if len(idx) < 3:
                    raise MalformedMesh(f"line {lineno}: polygon with <3 vertices")
                # Fan triangulation; CAD exporters commonly emit quads.
                for k in range(1, len(idx) - 1):
                    groups[current].append([idx[0], idx[k], idx[k + 1]])
            # vn/vt/usemtl/o/s lines carry no face data; ignored.

    if not groups:
        raise EmptyModel(f"{path}: no face groups")
    for name in order:
        if not groups[name]:
            raise EmptyFace(f"{path}: group {name!r} has no triangles")

    face_ids = _resolve_face_ids(order)

    vertices = np.asarray(raw_vertices, dtype=np.float64) * scale
    tri_list = [np.asarray(groups[name], dtype=np.int64) for name in order]
    all_tris = np.vstack(tri_list)

    # Drop unreferenced vertices before welding so epsilon reflects geometry.
    used = np.unique(all_tris)
    remap = np.full(len(vertices), -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    vertices = vertices[used]
    all_tris = remap[all_tris]

    vertices, all_tris = _weld(vertices, all_tris)

    # Reassemble per-face triangle arrays, dropping degenerate triangles.
    aabb = Aabb.of_points(vertices)
    eps = WELD_EPSILON_REL * max(aabb.diagonal, np.finfo(np.float64).tiny)
    areas = triangle_areas(vertices, all_tris)
    offsets = np.cumsum([0] + [len(t) for t in tri_list])
    faces = []
    kept_order = sorted(range(len(order)), key=lambda i: face_ids[i])
    for i in kept_order:
        chunk = slice(offsets[i], offsets[i + 1])
        tris = all_tris[chunk]
        good = areas[chunk] > eps * eps
        tris = tris[good]
        if len(tris) == 0:
            raise EmptyFace(f"{path}: group {order[i]!r} degenerate after welding")
        faces.append(Face(id=face_ids[i], triangles=tris.astype(np.int32),
                          total_area=float(triangle_areas(vertices, tris).sum())))

    triangles = np.vstack([f.triangles for f in faces]).astype(np.int32)
    tri_face = np.concatenate(
        [np.full(len(f.triangles), f.id, dtype=np.int32) for f in faces]
    )
    adjacency = build_adjacency(triangles, tri_face)

    labels = {
        str(k): [int(v) for v in vals]
        for k, vals in meta.get("labels", {}).items()
    }
    return CadModel(
        vertices=vertices,
        faces=faces,
        adjacency=adjacency,
        aabb=aabb,
        source_path=str(path),
        labels=labels,
        triangles=triangles,
        tri_face=tri_face,
    )


def _resolve_face_ids(names: list[str]) -> list[int]:
    """Map group names to dense face ids 0..N-1.

    All-``face_<k>`` names keep their declared ids (must be dense and unique);
    otherwise ids follow appearance order. Mixing conventions is an error.
    """
    matches = [_FACE_NAME.match(n) for n in names]
    if all(m is not None for m in matches):
        ids = [int(m.group(1)) for m in matches]
        if sorted(ids) != list(range(len(ids))):
            raise MalformedMesh("face_<id> group names must be dense and unique")
        return ids
    if any(m is not None for m in matches):
        raise MalformedMesh("cannot mix face_<id> and arbitrary group names")
    return list(range(len(names)))


def _weld(vertices: np.ndarray, triangles: np.ndarray):
    """Merge vertices within 1e-6 of the bounding-box diagonal.

    Quantizes to an epsilon grid; the representative of each cell is its
    first occurrence in file order, which keeps loading deterministic.
    """
    aabb = Aabb.of_points(vertices)
    eps = WELD_EPSILON_REL * aabb.diagonal
    if eps == 0.0:
        raise MalformedMesh("all vertices coincide")
    keys = np.round(vertices / eps).astype(np.int64)
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    # Renumber so welded ids follow first-occurrence order.
    rank = np.argsort(np.argsort(first, kind="stable"), kind="stable")
    welded = vertices[np.sort(first)]
    new_tris = rank[inverse][triangles]
    return welded, new_tris


def save_model(model: CadModel, path: str | Path, labels: dict | None = None) -> None:
    """Write the model back out as face-grouped OBJ (+ sidecar), in mm.

    Coordinates use shortest round-trip float formatting so a reload is
    bit-exact.
    """
    path = Path(path)
    lines = []
    for v in model.vertices:
        lines.append(f"v {float(v[0])!r} {float(v[1])!r} {float(v[2])!r}")
    for face in model.faces:
        lines.append(f"g face_{face.id}")
        for t in face.triangles:
            lines.append(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    meta = {"units": "mm"}
    use_labels = labels if labels is not None else model.labels
    if use_labels:
        meta["labels"] = use_labels
    sidecar_path(path).write_text(json.dumps(meta, indent=1), encoding="utf-8")
