"""Synthetic face-grouped test models with known topology and measurements.

Every generator returns a Fixture carrying the OBJ text, the sidecar meta
(units + part labels) and a manifest of ground-truth values (face ids,
hole centers, radii, counts) that tests treat as the oracle.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class HoleSpec:
    cell: tuple[int, int]
    radius: float
    kind: str = "through"  # "through" | "blind"
    depth: float | None = None  # blind holes only; measured from the top


@dataclass
class Fixture:
    obj_text: str
    meta: dict
    manifest: dict

    def write(self, directory: str | Path, name: str) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        obj_path = directory / f"{name}.obj"
        obj_path.write_text(self.obj_text, encoding="utf-8")
        (directory / f"{name}.meta.json").write_text(
            json.dumps(self.meta, indent=1), encoding="utf-8"
        )
        (directory / f"{name}.manifest.json").write_text(
            json.dumps(self.manifest, indent=1), encoding="utf-8"
        )
        return obj_path


class _Builder:
    """Accumulates shared vertices and face groups, emits OBJ text.

    Vertices are keyed by exact coordinates; generators compute shared
    points with identical expressions so welding is a no-op on fixtures.
    """

    def __init__(self):
        self.vertices: list[tuple[float, float, float]] = []
        self.index: dict[tuple[float, float, float], int] = {}
        self.groups: list[list[tuple[int, int, int]]] = []

    def vertex(self, x: float, y: float, z: float) -> int:
        key = (x, y, z)
        i = self.index.get(key)
        if i is None:
            i = len(self.vertices)
            self.index[key] = i
            self.vertices.append(key)
        return i

    def new_face(self) -> int:
        self.groups.append([])
        return len(self.groups) - 1

    def tri(self, face: int, a: int, b: int, c: int) -> None:
        self.groups[face].append((a, b, c))

    def quad(self, face: int, a: int, b: int, c: int, d: int) -> None:
        self.tri(face, a, b, c)
        self.tri(face, a, c, d)

    def obj_text(self) -> str:
        lines = [f"v {x!r} {y!r} {z!r}" for x, y, z in self.vertices]
        for fid, tris in enumerate(self.groups):
            lines.append(f"g face_{fid}")
            lines.extend(f"f {a + 1} {b + 1} {c + 1}" for a, b, c in tris)
        return "\n".join(lines) + "\n"

    def n_triangles(self) -> int:
        return sum(len(g) for g in self.groups)


def make_cube(size: float = 1.0, origin=(0.0, 0.0, 0.0)) -> Fixture:
    """Axis-aligned cube, 6 faces of 2 triangles each.

    Face ids: 0 -z, 1 +z, 2 -y, 3 +y, 4 -x, 5 +x.
    """
    b = _Builder()
    ox, oy, oz = origin
    x0, x1 = ox, ox + size
    y0, y1 = oy, oy + size
    z0, z1 = oz, oz + size
    corners = {
        (i, j, k): b.vertex(x1 if i else x0, y1 if j else y0, z1 if k else z0)
        for i in (0, 1) for j in (0, 1) for k in (0, 1)
    }
    quads = [
        [(0, 0, 0), (0, 1, 0), (1, 1, 0), (1, 0, 0)],  # -z
        [(0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)],  # +z
        [(0, 0, 0), (1, 0, 0), (1, 0, 1), (0, 0, 1)],  # -y
        [(0, 1, 0), (0, 1, 1), (1, 1, 1), (1, 1, 0)],  # +y
        [(0, 0, 0), (0, 0, 1), (0, 1, 1), (0, 1, 0)],  # -x
        [(1, 0, 0), (1, 1, 0), (1, 1, 1), (1, 0, 1)],  # +x
    ]
    for q in quads:
        f = b.new_face()
        b.quad(f, *(corners[c] for c in q))
    manifest = {
        "faces": {"zmin": 0, "zmax": 1, "ymin": 2, "ymax": 3, "xmin": 4, "xmax": 5},
        "counts": {"faces": 6, "triangles": 12, "vertices": 8},
        "size": size,
        "origin": list(origin),
    }
    return Fixture(b.obj_text(), {"units": "mm"}, manifest)


def make_two_cubes(size: float = 1.0, gap: float = 3.0) -> Fixture:
    """Two disjoint cubes in one file; adjacency splits into two components."""
    a = make_cube(size, (0.0, 0.0, 0.0))
    c = make_cube(size, (size + gap, 0.0, 0.0))
    # Concatenate, renumbering the second cube's groups and vertices.
    b = _Builder()
    for fixture in (a, c):
        id_map = {}
        lines = fixture.obj_text.splitlines()
        face = None
        for line in lines:
            parts = line.split()
            if parts[0] == "v":
                id_map[len(id_map)] = b.vertex(*(float(p) for p in parts[1:4]))
            elif parts[0] == "g":
                face = b.new_face()
            elif parts[0] == "f":
                ids = [id_map[int(p) - 1] for p in parts[1:]]
                b.tri(face, *ids)
    manifest = {
        "counts": {"faces": 12, "triangles": 24},
        "components": [list(range(6)), list(range(6, 12))],
    }
    return Fixture(b.obj_text(), {"units": "mm"}, manifest)


def make_cylinder(radius: float = 5.0, height: float = 10.0, segments: int = 64,
                  labels: dict | None = None) -> Fixture:
    """Closed cylinder, base center at the origin, axis +Z.

    Face ids: 0 wall, 1 top cap, 2 bottom cap.
    """
    if segments < 8 or segments % 4:
        raise ValueError("segments must be >=8 and a multiple of 4")
    b = _Builder()
    wall, top, bottom = b.new_face(), b.new_face(), b.new_face()

    def ring(z: float) -> list[int]:
        pts = []
        for k in range(segments):
            ang = 2.0 * math.pi * k / segments
            pts.append(b.vertex(radius * math.cos(ang), radius * math.sin(ang), z))
        return pts

    lo, hi = ring(0.0), ring(height)
    c_lo = b.vertex(0.0, 0.0, 0.0)
    c_hi = b.vertex(0.0, 0.0, height)
    for k in range(segments):
        k2 = (k + 1) % segments
        b.quad(wall, lo[k], lo[k2], hi[k2], hi[k])
        b.tri(top, c_hi, hi[k], hi[k2])
        b.tri(bottom, c_lo, lo[k2], lo[k])
    meta = {"units": "mm", "labels": labels if labels is not None else {"pin": [0]}}
    manifest = {
        "faces": {"wall": 0, "top": 1, "bottom": 2},
        "counts": {"faces": 3, "triangles": 4 * segments},
        "radius": radius,
        "height": height,
        "segments": segments,
        "center": [0.0, 0.0, height / 2.0],
    }
    return Fixture(b.obj_text(), meta, manifest)


def _rect_boundary_point(cx, cy, hw, hh, ang):
    """Point on the cell rectangle boundary in the direction ``ang``."""
    c, s = math.cos(ang), math.sin(ang)
    m = max(abs(c), abs(s))
    return cx + hw * c / m, cy + hh * s / m


def _hole_cell_cap(b, face, cx, cy, hw, hh, radius, z, segments, flip):
    """Annulus band between the hole circle and its cell rectangle."""
    circle = []
    rect = []
    for k in range(segments):
        ang = 2.0 * math.pi * k / segments
        circle.append(b.vertex(cx + radius * math.cos(ang),
                               cy + radius * math.sin(ang), z))
        rx, ry = _rect_boundary_point(cx, cy, hw, hh, ang)
        rect.append(b.vertex(rx, ry, z))
    for k in range(segments):
        k2 = (k + 1) % segments
        if flip:
            b.quad(face, circle[k2], circle[k], rect[k], rect[k2])
        else:
            b.quad(face, circle[k], circle[k2], rect[k2], rect[k])
    return circle


def make_plate_with_holes(width: float = 100.0, depth: float = 80.0,
                          thickness: float = 8.0, nx: int = 5, ny: int = 4,
                          holes: list[HoleSpec] | None = None,
                          segments: int = 32,
                          extra_labels: dict | None = None) -> Fixture:
    """Rectangular plate [0,W]x[0,D]x[0,T] with circular holes.

    The plate top/bottom are tessellated on an nx-by-ny cell grid; each hole
    occupies one interior cell. Through holes pierce the plate; blind holes
    stop at ``depth`` below the top and gain a cap face.

    Face ids: 0 top, 1 bottom, 2 side y=0, 3 side y=D, 4 side x=0,
    5 side x=W, then per hole: wall (+ cap for blind holes).
    """
    if holes is None:
        holes = [HoleSpec((1, 1), 5.0), HoleSpec((3, 1), 5.0),
                 HoleSpec((1, 2), 8.0), HoleSpec((3, 2), 8.0)]
    if segments % 8:
        raise ValueError("segments must be a multiple of 8 to hit cell corners")
    cw, ch = width / nx, depth / ny
    hole_at: dict[tuple[int, int], HoleSpec] = {}
    for h in holes:
        i, j = h.cell
        if not (1 <= i <= nx - 2 and 1 <= j <= ny - 2):
            raise ValueError(f"hole cell {h.cell} must be interior to the {nx}x{ny} grid")
        if h.radius > 0.45 * min(cw, ch):
            raise ValueError(f"hole radius {h.radius} too large for cell {h.cell}")
        if h.kind == "blind" and not (h.depth and 0 < h.depth < thickness):
            raise ValueError("blind hole needs 0 < depth < thickness")
        hole_at[h.cell] = h

    b = _Builder()
    top, bottom = b.new_face(), b.new_face()
    side_y0, side_y1, side_x0, side_x1 = (b.new_face() for _ in range(4))

    xs = [width * i / nx for i in range(nx + 1)]
    ys = [depth * j / ny for j in range(ny + 1)]

    top_rings: dict[tuple[int, int], list[int]] = {}
    bot_rings: dict[tuple[int, int], list[int]] = {}
    for j in range(ny):
        for i in range(nx):
            x0, x1, y0, y1 = xs[i], xs[i + 1], ys[j], ys[j + 1]
            hole = hole_at.get((i, j))
            cx, cy = (x0 + x1) / 2.0, (y0 + y1) / 2.0
            if hole is None:
                b.quad(top, b.vertex(x0, y0, thickness), b.vertex(x1, y0, thickness),
                       b.vertex(x1, y1, thickness), b.vertex(x0, y1, thickness))
                b.quad(bottom, b.vertex(x0, y0, 0.0), b.vertex(x0, y1, 0.0),
                       b.vertex(x1, y1, 0.0), b.vertex(x1, y0, 0.0))
            else:
                top_rings[(i, j)] = _hole_cell_cap(
                    b, top, cx, cy, cw / 2.0, ch / 2.0, hole.radius,
                    thickness, segments, flip=False)
                if hole.kind == "through":
                    bot_rings[(i, j)] = _hole_cell_cap(
                        b, bottom, cx, cy, cw / 2.0, ch / 2.0, hole.radius,
                        0.0, segments, flip=True)
                else:
                    b.quad(bottom, b.vertex(x0, y0, 0.0), b.vertex(x0, y1, 0.0),
                           b.vertex(x1, y1, 0.0), b.vertex(x1, y0, 0.0))

    for i in range(nx):
        x0, x1 = xs[i], xs[i + 1]
        b.quad(side_y0, b.vertex(x0, 0.0, 0.0), b.vertex(x1, 0.0, 0.0),
               b.vertex(x1, 0.0, thickness), b.vertex(x0, 0.0, thickness))
        b.quad(side_y1, b.vertex(x1, depth, 0.0), b.vertex(x0, depth, 0.0),
               b.vertex(x0, depth, thickness), b.vertex(x1, depth, thickness))
    for j in range(ny):
        y0, y1 = ys[j], ys[j + 1]
        b.quad(side_x0, b.vertex(0.0, y1, 0.0), b.vertex(0.0, y0, 0.0),
               b.vertex(0.0, y0, thickness), b.vertex(0.0, y1, thickness))
        b.quad(side_x1, b.vertex(width, y0, 0.0), b.vertex(width, y1, 0.0),
               b.vertex(width, y1, thickness), b.vertex(width, y0, thickness))

    hole_entries = []
    label_hole, label_through, label_blind = [], [], []
    for h in holes:
        i, j = h.cell
        cx, cy = (xs[i] + xs[i + 1]) / 2.0, (ys[j] + ys[j + 1]) / 2.0
        ring_top = top_rings[(i, j)]
        wall = b.new_face()
        if h.kind == "through":
            ring_bot = bot_rings[(i, j)]
            for k in range(segments):
                k2 = (k + 1) % segments
                b.quad(wall, ring_top[k], ring_top[k2], ring_bot[k2], ring_bot[k])
            cap = None
            z_lo, z_hi = 0.0, thickness
        else:
            z_lo, z_hi = thickness - h.depth, thickness
            ring_bot = [b.vertex(cx + h.radius * math.cos(2.0 * math.pi * k / segments),
                                 cy + h.radius * math.sin(2.0 * math.pi * k / segments),
                                 z_lo)
                        for k in range(segments)]
            for k in range(segments):
                k2 = (k + 1) % segments
                b.quad(wall, ring_top[k], ring_top[k2], ring_bot[k2], ring_bot[k])
            cap = b.new_face()
            center = b.vertex(cx, cy, z_lo)
            for k in range(segments):
                k2 = (k + 1) % segments
                b.tri(cap, center, ring_bot[k2], ring_bot[k])
        hole_entries.append({
            "wall": wall, "cap": cap, "kind": h.kind,
            "center": [cx, cy, (z_lo + z_hi) / 2.0],
            "radius": h.radius,
            "depth": h.depth if h.kind == "blind" else thickness,
        })
        label_hole.append(wall)
        (label_through if h.kind == "through" else label_blind).append(wall)

    labels = {"hole": label_hole}
    if label_through:
        labels["through hole"] = label_through
    if label_blind:
        labels["blind hole"] = label_blind
    if extra_labels:
        labels.update(extra_labels)
    manifest = {
        "faces": {"top": 0, "bottom": 1, "side_ymin": 2, "side_ymax": 3,
                  "side_xmin": 4, "side_xmax": 5},
        "holes": hole_entries,
        "counts": {"faces": len(b.groups), "triangles": b.n_triangles()},
        "plate": {"width": width, "depth": depth, "thickness": thickness},
        "segments": segments,
    }
    return Fixture(b.obj_text(), {"units": "mm", "labels": labels}, manifest)


def make_plate_before_block(width: float = 80.0, depth: float = 80.0,
                            thickness: float = 6.0,
                            holes: list[HoleSpec] | None = None,
                            gap: float = 10.0, block_thickness: float = 10.0,
                            segments: int = 32) -> Fixture:
    """Plate with through holes floating above a separate block.

    Looking down from +Z the block is visible only through the holes; its
    faces are not adjacent to any plate face, so closest-face pruning must
    discard them from any hole detection.
    """
    if holes is None:
        holes = [HoleSpec((1, 1), 8.0), HoleSpec((2, 2), 8.0)]
    plate = make_plate_with_holes(width, depth, thickness, nx=4, ny=4,
                                  holes=holes, segments=segments)
    b = _Builder()
    id_map: dict[int, int] = {}
    face = None
    for line in plate.obj_text.splitlines():
        parts = line.split()
        if parts[0] == "v":
            id_map[len(id_map)] = b.vertex(*(float(p) for p in parts[1:4]))
        elif parts[0] == "g":
            face = b.new_face()
        elif parts[0] == "f":
            b.tri(face, *(id_map[int(p) - 1] for p in parts[1:]))
    n_plate_faces = len(b.groups)

    z1, z0 = -gap, -gap - block_thickness
    corners = {
        (i, j, k): b.vertex(width if i else 0.0, depth if j else 0.0, z1 if k else z0)
        for i in (0, 1) for j in (0, 1) for k in (0, 1)
    }
    quads = [
        [(0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)],  # block top (+z)
        [(0, 0, 0), (0, 1, 0), (1, 1, 0), (1, 0, 0)],  # block bottom
        [(0, 0, 0), (1, 0, 0), (1, 0, 1), (0, 0, 1)],
        [(0, 1, 0), (0, 1, 1), (1, 1, 1), (1, 1, 0)],
        [(0, 0, 0), (0, 0, 1), (0, 1, 1), (0, 1, 0)],
        [(1, 0, 0), (1, 1, 0), (1, 1, 1), (1, 0, 1)],
    ]
    for q in quads:
        f = b.new_face()
        b.quad(f, *(corners[c] for c in q))

    manifest = dict(plate.manifest)
    manifest["counts"] = {"faces": len(b.groups), "triangles": b.n_triangles()}
    manifest["block_faces"] = list(range(n_plate_faces, len(b.groups)))
    manifest["block_top"] = n_plate_faces
    return Fixture(b.obj_text(), plate.meta, manifest)
