"""Mask-to-face alignment, multi-view segmentation, merging and side filters.

Alignment follows three steps: reject whole-model masks (>45% of model
pixels), keep faces with more than 5% of their visible surface masked, then
prune candidates to the adjacency component of the masked face closest to
the viewport, which drops faces seen only through openings.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatch, ProviderUnavailable
from ..geometry import CadModel
from ..render import (
    MAIN_AXIS_ORDER,
    RenderBuffers,
    ViewSpec,
    active_backend,
    camera_for_view,
    render,
)
from .config import PipelineConfig
from .masks import ScoredMask
from .providers import SegmentationProvider


class _Rejected:
    """Singleton result for masks that cover too much of the model."""

    def __repr__(self):
        return "REJECTED"

    def __bool__(self):
        return False


REJECTED = _Rejected()


@dataclass
class PartInstance:
    """A detected part: connected face ids plus detection provenance."""

    face_ids: frozenset[int]
    provenance: list[tuple[str, int, float]] = field(default_factory=list)

    def __post_init__(self):
        self.face_ids = frozenset(self.face_ids)
        if not self.face_ids:
            raise ValueError("PartInstance needs at least one face")

    def to_json(self) -> dict:
        return {
            "face_ids": sorted(self.face_ids),
            "provenance": [list(p) for p in self.provenance],
        }


def views_for_set(view_set: str) -> list[ViewSpec]:
    if view_set == "six_main_axes":
        return [ViewSpec.main_axis(side) for side in MAIN_AXIS_ORDER]
    return [ViewSpec.corner(k) for k in range(8)]


def rendered_view(model: CadModel, view: ViewSpec, cfg: PipelineConfig) -> RenderBuffers:
    """Render with a small per-model LRU cache; renders are pure."""
    cache: OrderedDict = model._cache.setdefault("view_renders", OrderedDict())
    key = (view.key, view.azimuth_perturbation_deg, cfg.render_width,
           cfg.render_height, active_backend())
    hit = cache.get(key)
    if hit is not None:
        cache.move_to_end(key)
        return hit
    camera = camera_for_view(model, view, cfg.render_width, cfg.render_height)
    buffers = render(model, camera)
    cache[key] = buffers
    while len(cache) > 16:
        cache.popitem(last=False)
    return buffers


def align_mask(mask: ScoredMask, buffers: RenderBuffers, model: CadModel,
               cfg: PipelineConfig, provenance=()) -> "PartInstance | None | _Rejected":
    """Project a 2D mask onto CAD faces.

    Returns REJECTED for whole-model masks, None when no face survives the
    coverage threshold (a provider false positive, not a failure), else the
    pruned PartInstance.
    """
    bits = np.asarray(mask.mask, dtype=bool)
    if bits.shape != buffers.face_id.shape:
        raise DimensionMismatch(
            f"mask {bits.shape} vs buffers {buffers.face_id.shape}")

    model_px = buffers.model_pixels()
    n_model = int(np.count_nonzero(model_px))
    if n_model == 0:
        return None
    inter = bits & model_px
    if np.count_nonzero(inter) / n_model > cfg.max_mask_model_coverage:
        return REJECTED

    n_faces = model.n_faces
    masked = np.bincount(buffers.face_id[inter], minlength=n_faces)
    visible = np.bincount(buffers.face_id[model_px], minlength=n_faces)
    with np.errstate(divide="ignore", invalid="ignore"):
        fraction = np.where(visible > 0, masked / visible, 0.0)
    candidates = np.flatnonzero(fraction > cfg.min_face_coverage)
    if candidates.size == 0:
        return None

    # Closest-face pruning: per-face depth over that face's masked pixels.
    face_depth = np.full(n_faces, np.inf)
    np.minimum.at(face_depth, buffers.face_id[inter], buffers.depth[inter])
    order = np.lexsort((candidates, face_depth[candidates]))
    seed = int(candidates[order[0]])
    component = model.adjacency.component(seed, set(int(c) for c in candidates))
    return PartInstance(face_ids=component, provenance=list(provenance))


def segment_model(model: CadModel, prompt: str, provider: SegmentationProvider,
                  cfg: PipelineConfig) -> list[PartInstance]:
    """Render every configured view, query the provider, align and merge."""
    if not prompt or not prompt.strip():
        raise ValueError("prompt must be non-empty")
    detections: list[PartInstance] = []
    for view in views_for_set(cfg.view_set):
        buffers = rendered_view(model, view, cfg)
        try:
            masks = provider.segment(buffers.color, prompt, cfg.box_score_threshold)
        except ProviderUnavailable as exc:
            raise ProviderUnavailable(str(exc), view=view.key) from exc
        for index, scored in enumerate(masks):
            # Applied post hoc so providers with internal filtering behave
            # the same as ones returning raw detections.
            if scored.score < cfg.box_score_threshold:
                continue
            part = align_mask(scored, buffers, model, cfg,
                              provenance=[(view.key, index, scored.score)])
            if isinstance(part, PartInstance):
                detections.append(part)
    return merge_detections(detections)


def merge_detections(detections: list[PartInstance]) -> list[PartInstance]:
    """Union detections with intersecting face sets until a fixpoint.

    Output face sets are pairwise disjoint; provenance concatenates in
    input order. Results sort by smallest face id, so merging is
    idempotent and independent of view order.
    """
    merged: list[PartInstance] = []
    for det in detections:
        faces = set(det.face_ids)
        provenance = list(det.provenance)
        keep = []
        for existing in merged:
            if faces & existing.face_ids:
                faces |= existing.face_ids
                provenance = existing.provenance + provenance
            else:
                keep.append(existing)
        keep.append(PartInstance(face_ids=frozenset(faces), provenance=provenance))
        merged = keep
    return sorted(merged, key=lambda p: min(p.face_ids))


def filter_by_sides(model: CadModel, parts: list[PartInstance],
                    sides: set[str] | list[str], cfg: PipelineConfig) -> list[PartInstance]:
    """Keep parts with enough visible pixels from at least one requested side."""
    sides = list(sides)
    if not sides:
        raise ValueError("sides must be non-empty")
    unknown = [s for s in sides if s not in MAIN_AXIS_ORDER]
    if unknown:
        raise ValueError(f"unknown sides {unknown}; expected {MAIN_AXIS_ORDER}")
    counts_per_view = []
    for side in sorted(set(sides), key=MAIN_AXIS_ORDER.index):
        buffers = rendered_view(model, ViewSpec.main_axis(side), cfg)
        counts_per_view.append(
            np.bincount(buffers.face_id[buffers.model_pixels()],
                        minlength=model.n_faces))
    retained = []
    for part in parts:
        ids = sorted(part.face_ids)
        for counts in counts_per_view:
            if int(counts[ids].sum()) >= cfg.min_visibility_pixels:
                retained.append(part)
                break
    return retained
