"""Wire protocol: request/response models, JSON schemas, mask RLE.

The mask encoding is row-major with alternating run counts starting with a
zero-run: {"size": [H, W], "counts": [...]}.
"""

from __future__ import annotations

import numpy as np
from pydantic import BaseModel, Field


class SegmentRequest(BaseModel):
    image: str = Field(description="base64-encoded PNG, RGB")
    prompt: str = Field(min_length=1)
    box_threshold: float = Field(ge=0.0, le=1.0)


SEGMENT_REQUEST_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "SegmentRequest",
    "type": "object",
    "required": ["image", "prompt", "box_threshold"],
    "properties": {
        "image": {"type": "string", "contentEncoding": "base64"},
        "prompt": {"type": "string", "minLength": 1},
        "box_threshold": {"type": "number", "minimum": 0.0, "maximum": 1.0},
    },
    "additionalProperties": False,
}

SEGMENT_RESPONSE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "SegmentResponse",
    "type": "object",
    "required": ["detections"],
    "properties": {
        "detections": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["bbox", "score", "mask_rle"],
                "properties": {
                    "bbox": {
                        "type": "array",
                        "items": {"type": "integer", "minimum": 0},
                        "minItems": 4,
                        "maxItems": 4,
                    },
                    "score": {"type": "number", "minimum": 0.0, "maximum": 1.0},
                    "mask_rle": {
                        "type": "object",
                        "required": ["size", "counts"],
                        "properties": {
                            "size": {
                                "type": "array",
                                "items": {"type": "integer", "minimum": 0},
                                "minItems": 2,
                                "maxItems": 2,
                            },
                            "counts": {
                                "type": "array",
                                "items": {"type": "integer", "minimum": 0},
                            },
                        },
                        "additionalProperties": False,
                    },
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}

HEALTH_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "Health",
    "type": "object",
    "required": ["status"],
    "properties": {
        "status": {"enum": ["ok", "loading", "failed"]},
        "model_versions": {"type": "object"},
        "reason": {"type": "string"},
    },
}


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
    return {"size": [h, w], "counts": [int(r) for r in runs]}


def decode_mask(rle: dict) -> np.ndarray:
    h, w = rle["size"]
    flat = np.zeros(h * w, dtype=bool)
    pos = 0
    value = False
    for run in rle["counts"]:
        if value:
            flat[pos:pos + run] = True
        pos += run
        value = not value
    if pos != h * w:
        raise ValueError(f"RLE covers {pos} of {h * w} pixels")
    return flat.reshape(h, w)
