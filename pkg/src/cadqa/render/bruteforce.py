"""Brute-force per-pixel intersection oracle.

Tests every ray against every triangle with no spatial index. Independent
of the BVH paths (this file never touches bvh.py) but uses the same
intersection expressions, so the accelerated kernels must reproduce its
buffers exactly on small meshes.
"""

from __future__ import annotations

import numpy as np

from .kernels_numba import DET_EPS

_PX_CHUNK = 4096
_TRI_CHUNK = 512


def cast_rays(origin0, du, dv, direction, width, height,
              ax, ay, az, e1x, e1y, e1z, e2x, e2y, e2z):
    n_tris = ax.shape[0]
    dx, dy, dz = direction[0], direction[1], direction[2]

    # Per-triangle terms depend only on the shared direction.
    px_ = dy * e2z - dz * e2y
    py_ = dz * e2x - dx * e2z
    pz_ = dx * e2y - dy * e2x
    det = e1x * px_ + e1y * py_ + e1z * pz_
    with np.errstate(divide="ignore"):
        inv_det = 1.0 / det
    det_ok = np.abs(det) >= DET_EPS

    out_tri = np.full((height, width), -1, dtype=np.int32)
    out_t = np.full((height, width), np.inf)

    pix = np.arange(width * height, dtype=np.int64)
    for p0 in range(0, pix.size, _PX_CHUNK):
        chunk = pix[p0:p0 + _PX_CHUNK]
        gx = (chunk % width).astype(np.float64)
        gy = (chunk // width).astype(np.float64)
        ox = (origin0[0] + gx * du[0] + gy * dv[0])[:, None]
        oy = (origin0[1] + gx * du[1] + gy * dv[1])[:, None]
        oz = (origin0[2] + gx * du[2] + gy * dv[2])[:, None]

        best_t = np.full(chunk.size, np.inf)
        best_tri = np.full(chunk.size, -1, dtype=np.int64)
        for t0 in range(0, n_tris, _TRI_CHUNK):
            sl = slice(t0, min(t0 + _TRI_CHUNK, n_tris))
            with np.errstate(invalid="ignore"):
                tx = ox - ax[sl]
                ty = oy - ay[sl]
                tz = oz - az[sl]
                u = (tx * px_[sl] + ty * py_[sl] + tz * pz_[sl]) * inv_det[sl]
                qx = ty * e1z[sl] - tz * e1y[sl]
                qy = tz * e1x[sl] - tx * e1z[sl]
                qz = tx * e1y[sl] - ty * e1x[sl]
                v = (dx * qx + dy * qy + dz * qz) * inv_det[sl]
                t = (e2x[sl] * qx + e2y[sl] * qy + e2z[sl] * qz) * inv_det[sl]
                good = det_ok[sl] \
                    & (u >= 0.0) & (u <= 1.0) \
                    & (v >= 0.0) & (u + v <= 1.0) \
                    & (t >= 0.0)
            t = np.where(good, t, np.inf)
            col = np.argmin(t, axis=1)
            rows = np.arange(chunk.size)
            cand_t = t[rows, col]
            # Triangle chunks ascend, so equal-t later candidates never win.
            better = cand_t < best_t
            best_t = np.where(better, cand_t, best_t)
            best_tri = np.where(better, np.arange(sl.start, sl.stop)[col], best_tri)

        rows2 = chunk // width
        cols2 = chunk % width
        out_tri[rows2, cols2] = best_tri.astype(np.int32)
        out_t[rows2, cols2] = best_t
    return out_tri, out_t
