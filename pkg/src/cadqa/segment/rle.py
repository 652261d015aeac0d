"""Run-length encoding for binary masks.

Row-major scan with alternating run counts, always starting with a run of
zeros: {"size": [H, W], "counts": [...]}. Used for mask debugging dumps and
on the segmentation wire protocol.
"""

from __future__ import annotations

import numpy as np


def encode_mask(mask: np.ndarray) -> dict:
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    flat = mask.ravel()
    if flat.size == 0:
        return {"size": [h, w], "counts": []}
    changes = np.flatnonzero(np.diff(flat)) + 1
    bounds = np.concatenate([[0], changes, [flat.size]])
    runs = np.diff(bounds).tolist()
    if flat[0]:
        runs = [0] + runs
    return {"size": [h, w], "counts": runs}


def decode_mask(rle: dict) -> np.ndarray:
    h, w = rle["size"]
    counts = rle["counts"]
    total = h * w
    flat = np.zeros(total, dtype=bool)
    pos = 0
    value = False
    for run in counts:
        if value:
            flat[pos:pos + run] = True
        pos += run
        value = not value
    if pos != total:
        raise ValueError(f"RLE covers {pos} pixels, expected {total}")
    return flat.reshape(h, w)
