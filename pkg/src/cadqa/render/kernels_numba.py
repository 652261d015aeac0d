"""JIT ray-casting kernel: per-pixel ordered BVH traversal.

The Moller-Trumbore expressions here must stay textually in sync with
kernels_numpy and bruteforce: identical operation order gives bit-identical
hit parameters, which the equivalence suite relies on. Ties on t resolve to
the lowest triangle index in every path, which makes the result independent
of traversal order.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

DET_EPS = 1e-12
_STACK_DEPTH = 128


@njit(cache=True, inline="always")
def _slab_near(nodes_min, nodes_max, ni, ox, oy, oz, dx, dy, dz, tmax):
    """Entry distance of the ray into node ni within [0, tmax], inf on miss."""
    t0 = 0.0
    t1 = tmax
    if dx != 0.0:
        inv = 1.0 / dx
        ta = (nodes_min[ni, 0] - ox) * inv
        tb = (nodes_max[ni, 0] - ox) * inv
        if ta > tb:
            ta, tb = tb, ta
        if ta > t0:
            t0 = ta
        if tb < t1:
            t1 = tb
    elif ox < nodes_min[ni, 0] or ox > nodes_max[ni, 0]:
        return np.inf
    if dy != 0.0:
        inv = 1.0 / dy
        ta = (nodes_min[ni, 1] - oy) * inv
        tb = (nodes_max[ni, 1] - oy) * inv
        if ta > tb:
            ta, tb = tb, ta
        if ta > t0:
            t0 = ta
        if tb < t1:
            t1 = tb
    elif oy < nodes_min[ni, 1] or oy > nodes_max[ni, 1]:
        return np.inf
    if dz != 0.0:
        inv = 1.0 / dz
        ta = (nodes_min[ni, 2] - oz) * inv
        tb = (nodes_max[ni, 2] - oz) * inv
        if ta > tb:
            ta, tb = tb, ta
        if ta > t0:
            t0 = ta
        if tb < t1:
            t1 = tb
    elif oz < nodes_min[ni, 2] or oz > nodes_max[ni, 2]:
        return np.inf
    if t0 > t1:
        return np.inf
    return t0


@njit(cache=True, parallel=True)
def cast_rays(origin0, du, dv, direction, width, height,
              nodes_min, nodes_max, node_left, node_right, node_count,
              tri_order, ax, ay, az, e1x, e1y, e1z, e2x, e2y, e2z,
              out_tri, out_t):
    dx, dy, dz = direction[0], direction[1], direction[2]
    for py in prange(height):
        stack = np.empty(_STACK_DEPTH, np.int32)
        tstack = np.empty(_STACK_DEPTH, np.float64)
        for px in range(width):
            ox = origin0[0] + px * du[0] + py * dv[0]
            oy = origin0[1] + px * du[1] + py * dv[1]
            oz = origin0[2] + px * du[2] + py * dv[2]
            best_t = np.inf
            best_tri = -1
            t_root = _slab_near(nodes_min, nodes_max, 0,
                                ox, oy, oz, dx, dy, dz, best_t)
            sp = 0
            if t_root != np.inf:
                stack[0] = 0
                tstack[0] = t_root
                sp = 1
            while sp > 0:
                sp -= 1
                ni = stack[sp]
                if tstack[sp] > best_t:
                    continue
                cnt = node_count[ni]
                if cnt == 0:
                    left = node_left[ni]
                    right = node_right[ni]
                    tl = _slab_near(nodes_min, nodes_max, left,
                                    ox, oy, oz, dx, dy, dz, best_t)
                    tr = _slab_near(nodes_min, nodes_max, right,
                                    ox, oy, oz, dx, dy, dz, best_t)
                    # Push the farther child first so the nearer pops first.
                    if tl <= tr:
                        if tr != np.inf:
                            stack[sp] = right
                            tstack[sp] = tr
                            sp += 1
                        if tl != np.inf:
                            stack[sp] = left
                            tstack[sp] = tl
                            sp += 1
                    else:
                        if tl != np.inf:
                            stack[sp] = left
                            tstack[sp] = tl
                            sp += 1
                        stack[sp] = right
                        tstack[sp] = tr
                        sp += 1
                    continue
                s0 = node_left[ni]
                for q in range(s0, s0 + cnt):
                    ti = tri_order[q]
                    px_ = dy * e2z[ti] - dz * e2y[ti]
                    py_ = dz * e2x[ti] - dx * e2z[ti]
                    pz_ = dx * e2y[ti] - dy * e2x[ti]
                    det = e1x[ti] * px_ + e1y[ti] * py_ + e1z[ti] * pz_
                    if -DET_EPS < det < DET_EPS:
                        continue
                    inv_det = 1.0 / det
                    tx = ox - ax[ti]
                    ty = oy - ay[ti]
                    tz = oz - az[ti]
                    u = (tx * px_ + ty * py_ + tz * pz_) * inv_det
                    if u < 0.0 or u > 1.0:
                        continue
                    qx = ty * e1z[ti] - tz * e1y[ti]
                    qy = tz * e1x[ti] - tx * e1z[ti]
                    qz = tx * e1y[ti] - ty * e1x[ti]
                    v = (dx * qx + dy * qy + dz * qz) * inv_det
                    if v < 0.0 or u + v > 1.0:
                        continue
                    t = (e2x[ti] * qx + e2y[ti] * qy + e2z[ti] * qz) * inv_det
                    if t < 0.0:
                        continue
                    if t < best_t or (t == best_t and ti < best_tri):
                        best_t = t
                        best_tri = ti
            out_tri[py, px] = best_tri
            out_t[py, px] = best_t
