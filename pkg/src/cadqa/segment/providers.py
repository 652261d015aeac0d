"""Segmentation providers: the pluggable mask source of the pipeline.

The oracle provider synthesizes perfect masks from the ground-truth face
labels of a fixture by inverting the render palette, enabling deterministic
end-to-end tests with no ML in the loop. The remote provider speaks the
segmentation wire protocol.
"""

from __future__ import annotations

import base64
import io
from abc import ABC, abstractmethod
from typing import Callable

import numpy as np

from ..errors import ProviderUnavailable
from ..geometry import CadModel
from ..render import decode_face_ids
from .masks import ScoredMask
from .rle import decode_mask


class SegmentationProvider(ABC):
    """Stateless per call; implementations must tolerate concurrent calls."""

    @abstractmethod
    def segment(self, image: np.ndarray, prompt: str,
                box_threshold: float) -> list[ScoredMask]:
        ...


class NullProvider(SegmentationProvider):
    def segment(self, image, prompt, box_threshold):
        return []


class CallbackProvider(SegmentationProvider):
    """Adapts a plain function; handy for tests and replayed masks."""

    def __init__(self, fn: Callable[[np.ndarray, str, float], list[ScoredMask]]):
        self._fn = fn

    def segment(self, image, prompt, box_threshold):
        return self._fn(image, prompt, box_threshold)


class OracleProvider(SegmentationProvider):
    """Perfect masks from sidecar labels.

    Labeled face sets are split into adjacency components, one mask per
    component per view; components invisible in a view yield no mask.
    """

    def __init__(self, model: CadModel, score: float = 1.0):
        self._model = model
        self._score = score
        self._labels = {k.strip().lower(): frozenset(v)
                        for k, v in model.labels.items()}

    def segment(self, image, prompt, box_threshold):
        labeled = self._labels.get(prompt.strip().lower())
        if not labeled:
            return []
        face_map = decode_face_ids(image, self._model.n_faces)
        out = []
        for comp in self._model.adjacency.components(labeled):
            mask = np.isin(face_map, np.fromiter(comp, dtype=np.int32))
            if mask.any():
                out.append(ScoredMask.from_mask(mask, self._score))
        return out


class RemoteProvider(SegmentationProvider):
    """Client of the segmentation service wire protocol (POST /v1/segment)."""

    def __init__(self, base_url: str, timeout: float = 120.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout

    def segment(self, image, prompt, box_threshold):
        import requests
        from PIL import Image

        buf = io.BytesIO()
        Image.fromarray(image, mode="RGB").save(buf, format="PNG")
        payload = {
            "image": base64.b64encode(buf.getvalue()).decode("ascii"),
            "prompt": prompt,
            "box_threshold": box_threshold,
        }
        try:
            resp = requests.post(f"{self.base_url}/v1/segment", json=payload,
                                 timeout=self.timeout)
            resp.raise_for_status()
            body = resp.json()
        except requests.RequestException as exc:
            raise ProviderUnavailable(f"segmentation service: {exc}") from exc
        out = []
        for det in body.get("detections", []):
            mask = decode_mask(det["mask_rle"])
            out.append(ScoredMask(mask=mask, bbox=tuple(det["bbox"]),
                                  score=float(det["score"])))
        return out


def resolve_provider(spec: str, model: CadModel) -> SegmentationProvider:
    """CLI provider spec: ``oracle`` | ``null`` | ``remote:<base-url>``."""
    if spec == "oracle":
        return OracleProvider(model)
    if spec == "null":
        return NullProvider()
    if spec.startswith("remote:"):
        return RemoteProvider(spec.split(":", 1)[1])
    raise ValueError(f"unknown provider spec {spec!r}")
