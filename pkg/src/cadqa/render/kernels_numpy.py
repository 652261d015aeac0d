"""Pure-numpy ray-casting fallback.

Rays are orthographic (one shared direction), so the image is processed in
tiles: BVH nodes are pre-projected onto the viewport axes, each tile
collects the triangles of BVH leaves overlapping its pixel rectangle, and
Moller-Trumbore runs vectorized over (pixels x candidates).

Intersection math mirrors kernels_numba operation-for-operation so both
backends produce identical buffers.
"""

from __future__ import annotations

import numpy as np

from .kernels_numba import DET_EPS

_TILE = 64
_CAND_CHUNK = 2048
# Projected-rectangle culling is padded so float error can only add
# candidates, never drop a real hit.
_RECT_PAD_PX = 0.5


def cast_rays(origin0, du, dv, direction, width, height,
              nodes_min, nodes_max, node_left, node_right, node_count,
              tri_order, ax, ay, az, e1x, e1y, e1z, e2x, e2y, e2z,
              out_tri, out_t):
    su = float(np.linalg.norm(du))
    sv = float(np.linalg.norm(dv))
    ru = du / su
    rv = dv / sv

    center = (nodes_min + nodes_max) * 0.5
    half = (nodes_max - nodes_min) * 0.5
    cu = (center - origin0) @ ru
    hu = half @ np.abs(ru)
    cv = (center - origin0) @ rv
    hv = half @ np.abs(rv)
    node_u0 = (cu - hu) / su - _RECT_PAD_PX
    node_u1 = (cu + hu) / su + _RECT_PAD_PX
    node_v0 = (cv - hv) / sv - _RECT_PAD_PX
    node_v1 = (cv + hv) / sv + _RECT_PAD_PX

    for ty0 in range(0, height, _TILE):
        ty1 = min(ty0 + _TILE, height)
        for tx0 in range(0, width, _TILE):
            tx1 = min(tx0 + _TILE, width)
            cands = _collect(node_u0, node_u1, node_v0, node_v1,
                             node_left, node_right, node_count, tri_order,
                             tx0, tx1 - 1, ty0, ty1 - 1)
            if cands.size == 0:
                out_tri[ty0:ty1, tx0:tx1] = -1
                out_t[ty0:ty1, tx0:tx1] = np.inf
                continue
            _intersect_tile(origin0, du, dv, direction,
                            tx0, tx1, ty0, ty1, cands,
                            ax, ay, az, e1x, e1y, e1z, e2x, e2y, e2z,
                            out_tri, out_t)


def _collect(node_u0, node_u1, node_v0, node_v1,
             node_left, node_right, node_count, tri_order,
             px0, px1, py0, py1) -> np.ndarray:
    """Triangle candidates for the pixel rectangle, ascending index order."""
    chunks = []
    stack = [0]
    while stack:
        ni = stack.pop()
        if node_u1[ni] < px0 or node_u0[ni] > px1 \
                or node_v1[ni] < py0 or node_v0[ni] > py1:
            continue
        cnt = node_count[ni]
        if cnt == 0:
            stack.append(int(node_left[ni]))
            stack.append(int(node_right[ni]))
        else:
            s0 = int(node_left[ni])
            chunks.append(tri_order[s0:s0 + cnt])
    if not chunks:
        return np.empty(0, dtype=np.int64)
    return np.sort(np.concatenate(chunks).astype(np.int64))


def _intersect_tile(origin0, du, dv, direction, tx0, tx1, ty0, ty1, cands,
                    ax, ay, az, e1x, e1y, e1z, e2x, e2y, e2z,
                    out_tri, out_t):
    pxs = np.arange(tx0, tx1, dtype=np.float64)
    pys = np.arange(ty0, ty1, dtype=np.float64)
    gx, gy = np.meshgrid(pxs, pys)
    ox = (origin0[0] + gx * du[0] + gy * dv[0]).ravel()[:, None]
    oy = (origin0[1] + gx * du[1] + gy * dv[1]).ravel()[:, None]
    oz = (origin0[2] + gx * du[2] + gy * dv[2]).ravel()[:, None]
    dx, dy, dz = direction[0], direction[1], direction[2]

    n_rays = ox.shape[0]
    best_t = np.full(n_rays, np.inf)
    best_tri = np.full(n_rays, -1, dtype=np.int64)

    for c0 in range(0, cands.size, _CAND_CHUNK):
        sub = cands[c0:c0 + _CAND_CHUNK]
        px_ = dy * e2z[sub] - dz * e2y[sub]
        py_ = dz * e2x[sub] - dx * e2z[sub]
        pz_ = dx * e2y[sub] - dy * e2x[sub]
        det = e1x[sub] * px_ + e1y[sub] * py_ + e1z[sub] * pz_
        with np.errstate(divide="ignore", invalid="ignore"):
            inv_det = 1.0 / det
            tx = ox - ax[sub]
            ty = oy - ay[sub]
            tz = oz - az[sub]
            u = (tx * px_ + ty * py_ + tz * pz_) * inv_det
            qx = ty * e1z[sub] - tz * e1y[sub]
            qy = tz * e1x[sub] - tx * e1z[sub]
            qz = tx * e1y[sub] - ty * e1x[sub]
            v = (dx * qx + dy * qy + dz * qz) * inv_det
            t = (e2x[sub] * qx + e2y[sub] * qy + e2z[sub] * qz) * inv_det
            good = (np.abs(det) >= DET_EPS) \
                & (u >= 0.0) & (u <= 1.0) \
                & (v >= 0.0) & (u + v <= 1.0) \
                & (t >= 0.0)
        t = np.where(good, t, np.inf)
        col = np.argmin(t, axis=1)  # first minimum = lowest triangle index
        rows = np.arange(n_rays)
        cand_t = t[rows, col]
        cand_tri = sub[col]
        better = (cand_t < best_t) \
            | ((cand_t == best_t) & np.isfinite(cand_t) & (cand_tri < best_tri))
        best_t = np.where(better, cand_t, best_t)
        best_tri = np.where(better, cand_tri, best_tri)

    shape = (ty1 - ty0, tx1 - tx0)
    out_tri[ty0:ty1, tx0:tx1] = best_tri.reshape(shape)
    out_t[ty0:ty1, tx0:tx1] = best_t.reshape(shape)
