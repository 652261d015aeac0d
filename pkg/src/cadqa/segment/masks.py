"""Scored segmentation masks as returned by providers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class ScoredMask:
    mask: np.ndarray  # (H, W) bool
    bbox: tuple[int, int, int, int]  # x, y, w, h in pixels
    score: float

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score must be in [0, 1], got {self.score}")
        x, y, w, h = self.bbox
        ys, xs = np.nonzero(self.mask)
        if xs.size and (xs.min() < x or xs.max() >= x + w
                        or ys.min() < y or ys.max() >= y + h):
            raise ValueError("mask pixels fall outside the bounding box")

    @staticmethod
    def from_mask(mask: np.ndarray, score: float) -> "ScoredMask":
        """Build with the tight bounding box of the set pixels."""
        mask = np.asarray(mask, dtype=bool)
        ys, xs = np.nonzero(mask)
        if xs.size == 0:
            bbox = (0, 0, 0, 0)
        else:
            bbox = (int(xs.min()), int(ys.min()),
                    int(xs.max() - xs.min() + 1), int(ys.max() - ys.min() + 1))
        return ScoredMask(mask=mask, bbox=bbox, score=score)
