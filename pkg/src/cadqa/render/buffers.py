"""Render output buffers and their on-disk formats."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import UnknownFace
from .camera import OrthoCamera

DEPTH_MAGIC = b"CADQDPT1"  # 8 bytes; header = magic + uint32 W + uint32 H


@dataclass
class RenderBuffers:
    """Per-pixel color, face-id and depth maps from one orthographic view.

    face_id is -1 where no face is hit; depth is +inf there and the color
    is pure black (the background, excluded from the palette).
    """

    color: np.ndarray  # (H, W, 3) uint8
    face_id: np.ndarray  # (H, W) int32, -1 = none
    depth: np.ndarray  # (H, W) float64, mm along view_direction
    camera: OrthoCamera
    n_faces: int

    @property
    def width(self) -> int:
        return self.color.shape[1]

    @property
    def height(self) -> int:
        return self.color.shape[0]

    def model_pixels(self) -> np.ndarray:
        return self.face_id >= 0

    def save_color_png(self, path: str | Path) -> None:
        Image.fromarray(self.color, mode="RGB").save(str(path))

    def save_face_id_png(self, path: str | Path) -> None:
        """16-bit grayscale PNG storing face id + 1 (0 = background)."""
        if self.n_faces >= 0xFFFF:
            raise UnknownFace("face ids exceed 16-bit PNG export range")
        ids = (self.face_id + 1).astype(np.uint16)
        Image.fromarray(ids).save(str(path))

    def save_depth_bin(self, path: str | Path) -> None:
        header = DEPTH_MAGIC + struct.pack("<II", self.width, self.height)
        data = self.depth.astype(np.float32).tobytes()
        Path(path).write_bytes(header + data)


def load_face_id_png(path: str | Path) -> np.ndarray:
    ids = np.asarray(Image.open(str(path)), dtype=np.int32)
    return ids - 1


def load_depth_bin(path: str | Path) -> np.ndarray:
    blob = Path(path).read_bytes()
    if blob[:8] != DEPTH_MAGIC:
        raise ValueError(f"{path}: not a depth dump")
    w, h = struct.unpack("<II", blob[8:16])
    depth = np.frombuffer(blob[16:], dtype=np.float32).reshape(h, w)
    return depth.astype(np.float64)
