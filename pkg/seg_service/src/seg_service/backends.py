"""Segmentation backends.

GroundedVocabBackend wraps a zero-shot text-prompted detector plus a
promptable mask refiner from the transformers hub (needs the ml extra and
downloaded weights). ColorRegionBackend is a dependency-free stand-in for
development and protocol testing: it proposes connected same-color regions
of the rendered image as instances with deterministic pseudo-scores.
"""

from __future__ import annotations

import hashlib
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np


@dataclass
class Detection:
    bbox: tuple[int, int, int, int]  # x, y, w, h
    score: float
    mask: np.ndarray  # (H, W) bool


class SegmentationBackend(ABC):
    """load() may be slow (model weights); detect() must be reentrant."""

    name = "base"

    @abstractmethod
    def load(self) -> None:
        ...

    @abstractmethod
    def versions(self) -> dict:
        ...

    @abstractmethod
    def detect(self, image: np.ndarray, prompt: str) -> list[Detection]:
        ...


def _bbox_of(mask: np.ndarray) -> tuple[int, int, int, int]:
    ys, xs = np.nonzero(mask)
    return (int(xs.min()), int(ys.min()),
            int(xs.max() - xs.min() + 1), int(ys.max() - ys.min() + 1))


def _flood_components(mask: np.ndarray, cap: int = 64) -> list[np.ndarray]:
    """4-connected components of a boolean mask."""
    from scipy import ndimage

    labels, count = ndimage.label(mask)
    return [labels == k for k in range(1, min(count, cap) + 1)]


class ColorRegionBackend(SegmentationBackend):
    """Deterministic dev backend: one instance per connected color region.

    Scores hash the prompt and region color into [0, 1), so varied prompts
    and thresholds exercise the full protocol without any ML.
    """

    name = "color-region"
    MAX_DETECTIONS = 32
    MIN_REGION_PX = 4

    def __init__(self):
        self._ready = False

    def load(self) -> None:
        self._ready = True

    def versions(self) -> dict:
        return {"backend": self.name, "version": "1"}

    def _score(self, prompt: str, color: tuple[int, int, int]) -> float:
        key = f"{prompt.strip().lower()}|{color[0]},{color[1]},{color[2]}"
        digest = hashlib.sha256(key.encode("utf-8")).digest()
        return int.from_bytes(digest[:4], "big") / 2 ** 32

    def detect(self, image: np.ndarray, prompt: str) -> list[Detection]:
        packed = (image[..., 0].astype(np.int64) << 16) \
            | (image[..., 1].astype(np.int64) << 8) | image[..., 2]
        detections = []
        for value in np.unique(packed):
            if value == 0:  # black background
                continue
            color = (int(value >> 16) & 0xFF, int(value >> 8) & 0xFF,
                     int(value) & 0xFF)
            color_mask = packed == value
            for comp in _flood_components(color_mask):
                if int(comp.sum()) < self.MIN_REGION_PX:
                    continue
                detections.append(Detection(
                    bbox=_bbox_of(comp),
                    score=self._score(prompt, color),
                    mask=comp,
                ))
        detections.sort(key=lambda d: (-d.score, d.bbox))
        return detections[:self.MAX_DETECTIONS]


class GroundedVocabBackend(SegmentationBackend):
    """Zero-shot detector + promptable masker from the transformers hub."""

    name = "grounded"

    def __init__(self, detector_id: str = "IDEA-Research/grounding-dino-tiny",
                 masker_id: str = "facebook/sam-vit-base",
                 device: str = "cpu"):
        self.detector_id = detector_id
        self.masker_id = masker_id
        self.device = device
        self._pipe = None

    def load(self) -> None:
        import torch  # noqa: F401
        from transformers import pipeline

        detector = pipeline("zero-shot-object-detection",
                            model=self.detector_id, device=self.device)
        masker = pipeline("mask-generation", model=self.masker_id,
                          device=self.device)
        self._pipe = (detector, masker)

    def versions(self) -> dict:
        return {"backend": self.name, "detector": self.detector_id,
                "masker": self.masker_id, "device": self.device}

    def detect(self, image: np.ndarray, prompt: str) -> list[Detection]:
        from PIL import Image

        detector, masker = self._pipe
        pil = Image.fromarray(image, mode="RGB")
        # Detector prompts end with a period by that model family's convention.
        labels = [prompt if prompt.endswith(".") else prompt + "."]
        boxes = detector(pil, candidate_labels=labels)
        detections = []
        for box in boxes:
            b = box["box"]
            x0, y0 = int(b["xmin"]), int(b["ymin"])
            x1, y1 = int(b["xmax"]), int(b["ymax"])
            crop_masks = masker(pil.crop((x0, y0, x1, y1)))["masks"]
            if not len(crop_masks):
                continue
            full = np.zeros(image.shape[:2], dtype=bool)
            crop = np.asarray(crop_masks[0], dtype=bool)
            full[y0:y0 + crop.shape[0], x0:x0 + crop.shape[1]] = crop
            if not full.any():
                continue
            detections.append(Detection(bbox=_bbox_of(full),
                                        score=float(box["score"]), mask=full))
        return detections


def make_backend(spec: str) -> SegmentationBackend:
    if spec == "color":
        return ColorRegionBackend()
    if spec.startswith("grounded"):
        return GroundedVocabBackend()
    raise ValueError(f"unknown backend {spec!r}")
