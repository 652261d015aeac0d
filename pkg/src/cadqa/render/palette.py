"""Deterministic distinct face colors.

Channels are multiples of 8 in 8..248, so any two palette entries differ in
some channel by at least 8 and no entry collides with the pure-black
background. A multiplicative hash permutes the 31^3 color cube so ids up to
29790 stay pairwise distinct.
"""

from __future__ import annotations

import numpy as np

from ..errors import PaletteOverflow

PALETTE_PERIOD = 31 ** 3  # 29791
_MULT = 2654435761 % PALETTE_PERIOD  # odd w.r.t. 31, so the map is a bijection


def face_color(face_id: int) -> tuple[int, int, int]:
    idx = (face_id * _MULT) % PALETTE_PERIOD
    d0 = idx % 31
    d1 = (idx // 31) % 31
    d2 = idx // 961
    return (8 * (d2 + 1), 8 * (d1 + 1), 8 * (d0 + 1))


def palette_for(n_faces: int) -> np.ndarray:
    """(n_faces, 3) uint8 palette; raises beyond the distinctness guarantee."""
    if n_faces > PALETTE_PERIOD:
        raise PaletteOverflow(
            f"{n_faces} faces exceed the {PALETTE_PERIOD}-color palette")
    ids = np.arange(n_faces, dtype=np.int64)
    idx = (ids * _MULT) % PALETTE_PERIOD
    out = np.empty((n_faces, 3), dtype=np.uint8)
    out[:, 0] = 8 * (idx // 961 + 1)
    out[:, 1] = 8 * ((idx // 31) % 31 + 1)
    out[:, 2] = 8 * (idx % 31 + 1)
    return out


def decode_face_ids(image: np.ndarray, n_faces: int) -> np.ndarray:
    """Invert the palette: RGB image -> per-pixel face id (-1 if no face).

    Exact because palette colors are pairwise distinct and never black.
    """
    pal = palette_for(n_faces)
    packed_pal = (pal[:, 0].astype(np.int64) << 16) \
        | (pal[:, 1].astype(np.int64) << 8) | pal[:, 2]
    lookup = {int(p): i for i, p in enumerate(packed_pal)}
    img = image.astype(np.int64)
    packed = (img[..., 0] << 16) | (img[..., 1] << 8) | img[..., 2]
    uniq, inverse = np.unique(packed, return_inverse=True)
    mapped = np.array([lookup.get(int(v), -1) for v in uniq], dtype=np.int32)
    return mapped[inverse].reshape(packed.shape)
