"""Median-split bounding volume hierarchy over triangles.

Built once per model in flat numpy arrays shared by the numba and numpy
traversal kernels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LEAF_SIZE = 4


@dataclass
class Bvh:
    nodes_min: np.ndarray  # (N, 3) float64
    nodes_max: np.ndarray  # (N, 3) float64
    node_left: np.ndarray  # (N,) int32: inner -> left child; leaf -> tri_order start
    node_right: np.ndarray  # (N,) int32: inner -> right child; leaf -> -1
    node_count: np.ndarray  # (N,) int32: 0 for inner nodes, else leaf triangle count
    tri_order: np.ndarray  # (T,) int32 triangle permutation grouped by leaf


def build_bvh(vertices: np.ndarray, triangles: np.ndarray, leaf_size: int = LEAF_SIZE) -> Bvh:
    tri = triangles.astype(np.int64)
    pts = vertices[tri]  # (T, 3, 3)
    tri_min = pts.min(axis=1)
    tri_max = pts.max(axis=1)
    centroids = pts.mean(axis=1)
    n = len(tri)

    order = np.arange(n, dtype=np.int64)
    nodes_min, nodes_max = [], []
    node_left, node_right, node_count = [], [], []

    # (start, end, parent index, is_left_child)
    stack: list[tuple[int, int, int, bool]] = [(0, n, -1, False)]
    while stack:
        start, end, parent, is_left = stack.pop()
        idx = order[start:end]
        node_id = len(nodes_min)
        nodes_min.append(tri_min[idx].min(axis=0))
        nodes_max.append(tri_max[idx].max(axis=0))
        if parent >= 0:
            if is_left:
                node_left[parent] = node_id
            else:
                node_right[parent] = node_id
        count = end - start
        if count <= leaf_size:
            node_left.append(start)
            node_right.append(-1)
            node_count.append(count)
            continue
        cent = centroids[idx]
        axis = int(np.argmax(cent.max(axis=0) - cent.min(axis=0)))
        half = count // 2
        part = np.argpartition(cent[:, axis], half)
        order[start:end] = idx[part]
        node_left.append(-1)
        node_right.append(-1)
        node_count.append(0)
        stack.append((start + half, end, node_id, False))
        stack.append((start, start + half, node_id, True))

    return Bvh(
        nodes_min=np.asarray(nodes_min, dtype=np.float64),
        nodes_max=np.asarray(nodes_max, dtype=np.float64),
        node_left=np.asarray(node_left, dtype=np.int32),
        node_right=np.asarray(node_right, dtype=np.int32),
        node_count=np.asarray(node_count, dtype=np.int32),
        tri_order=order.astype(np.int32),
    )
