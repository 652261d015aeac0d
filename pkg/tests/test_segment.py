from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cadqa.errors import DimensionMismatch, ProviderUnavailable
from cadqa.render import ViewSpec, camera_for_view, render
from cadqa.segment import (
    CallbackProvider,
    NullProvider,
    OracleProvider,
    PartInstance,
    PipelineConfig,
    REJECTED,
    ScoredMask,
    align_mask,
    decode_mask,
    encode_mask,
    filter_by_sides,
    merge_detections,
    segment_model,
)


def face_mask(buffers, face_ids) -> np.ndarray:
    return np.isin(buffers.face_id, np.asarray(sorted(face_ids), dtype=np.int32))


def first_k(mask: np.ndarray, k: int) -> np.ndarray:
    out = np.zeros_like(mask)
    idx = np.flatnonzero(mask.ravel())[:k]
    out.ravel()[idx] = True
    return out


@pytest.fixture()
def top_buffers(plate_model, test_cfg):
    cam = camera_for_view(plate_model, ViewSpec.main_axis("top"),
                          test_cfg.render_width, test_cfg.render_height)
    return render(plate_model, cam)


class TestAlignMask:
    def test_oracle_mask_maps_to_wall(self, plate_model, manifests, top_buffers, test_cfg):
        wall = manifests["plate4"]["holes"][0]["wall"]
        mask = ScoredMask.from_mask(face_mask(top_buffers, {wall}), 1.0)
        part = align_mask(mask, top_buffers, plate_model, test_cfg)
        assert isinstance(part, PartInstance)
        assert part.face_ids == frozenset({wall})

    def test_small_spill_excluded(self, plate_model, manifests, top_buffers, test_cfg):
        # Mask covers a hole wall fully plus ~2% of the top face.
        man = manifests["plate4"]
        wall = man["holes"][0]["wall"]
        top = man["faces"]["top"]
        top_visible = int(np.count_nonzero(top_buffers.face_id == top))
        spill = int(0.02 * top_visible)
        mask = face_mask(top_buffers, {wall}) \
            | first_k(face_mask(top_buffers, {top}), spill)
        part = align_mask(ScoredMask.from_mask(mask, 1.0),
                          top_buffers, plate_model, test_cfg)
        assert part.face_ids == frozenset({wall})

    def test_exactly_five_percent_excluded(self, plate_model, manifests,
                                           top_buffers, test_cfg):
        man = manifests["plate4"]
        wall = man["holes"][0]["wall"]
        top = man["faces"]["top"]
        top_visible = int(np.count_nonzero(top_buffers.face_id == top))
        at = int(np.floor(test_cfg.min_face_coverage * top_visible))
        mask = face_mask(top_buffers, {wall}) \
            | first_k(face_mask(top_buffers, {top}), at)
        part = align_mask(ScoredMask.from_mask(mask, 1.0),
                          top_buffers, plate_model, test_cfg)
        assert part.face_ids == frozenset({wall})

    def test_above_five_percent_included(self, plate_model, manifests,
                                         top_buffers, test_cfg):
        man = manifests["plate4"]
        wall = man["holes"][0]["wall"]
        top = man["faces"]["top"]
        top_visible = int(np.count_nonzero(top_buffers.face_id == top))
        above = int(np.floor(test_cfg.min_face_coverage * top_visible)) + 1
        mask = face_mask(top_buffers, {wall}) \
            | first_k(face_mask(top_buffers, {top}), above)
        part = align_mask(ScoredMask.from_mask(mask, 1.0),
                          top_buffers, plate_model, test_cfg)
        assert part.face_ids == frozenset({wall, top})

    def test_whole_model_mask_rejected(self, plate_model, top_buffers, test_cfg):
        model_px = top_buffers.model_pixels()
        n = int(np.count_nonzero(model_px))
        sixty = first_k(model_px, int(0.60 * n))
        result = align_mask(ScoredMask.from_mask(sixty, 1.0),
                            top_buffers, plate_model, test_cfg)
        assert result is REJECTED

    def test_at_45_percent_not_rejected(self, plate_model, top_buffers, test_cfg):
        model_px = top_buffers.model_pixels()
        n = int(np.count_nonzero(model_px))
        at = first_k(model_px, int(np.floor(0.45 * n)))
        result = align_mask(ScoredMask.from_mask(at, 1.0),
                            top_buffers, plate_model, test_cfg)
        assert result is not REJECTED
        assert isinstance(result, PartInstance)

    def test_just_above_45_percent_rejected(self, plate_model, top_buffers, test_cfg):
        model_px = top_buffers.model_pixels()
        n = int(np.count_nonzero(model_px))
        above = first_k(model_px, int(np.floor(0.45 * n)) + 1)
        result = align_mask(ScoredMask.from_mask(above, 1.0),
                            top_buffers, plate_model, test_cfg)
        assert result is REJECTED

    def test_background_only_mask_is_empty_result(self, plate_model,
                                                  top_buffers, test_cfg):
        mask = ~top_buffers.model_pixels()
        result = align_mask(ScoredMask.from_mask(mask, 1.0),
                            top_buffers, plate_model, test_cfg)
        assert result is None

    def test_dimension_mismatch(self, plate_model, top_buffers, test_cfg):
        small = ScoredMask.from_mask(np.zeros((10, 10), dtype=bool), 1.0)
        with pytest.raises(DimensionMismatch):
            align_mask(small, top_buffers, plate_model, test_cfg)

    def test_back_block_pruned(self, fig3_model, manifests, test_cfg):
        man = manifests["fig3"]
        cam = camera_for_view(fig3_model, ViewSpec.main_axis("top"),
                              test_cfg.render_width, test_cfg.render_height)
        buffers = render(fig3_model, cam)
        wall = man["holes"][0]["wall"]
        block_faces = set(man["block_faces"])
        # Mask covers the hole wall plus everything seen through the holes.
        mask = face_mask(buffers, {wall} | block_faces)
        part = align_mask(ScoredMask.from_mask(mask, 1.0),
                          buffers, fig3_model, test_cfg)
        assert isinstance(part, PartInstance)
        assert part.face_ids & block_faces == frozenset()
        assert wall in part.face_ids
        # Sanity: the block really was a candidate before pruning.
        visible_block = set(int(i) for i in np.unique(buffers.face_id)) & block_faces
        assert visible_block, "fixture must show the block through holes"


class TestSegmentModel:
    def test_four_holes_found(self, plate_model, manifests, test_cfg):
        parts = segment_model(plate_model, "hole", OracleProvider(plate_model),
                              test_cfg)
        expected = {frozenset({h["wall"]}) for h in manifests["plate4"]["holes"]}
        assert {p.face_ids for p in parts} == expected
        assert len(parts) == 4

    def test_null_provider_empty(self, plate_model, test_cfg):
        assert segment_model(plate_model, "hole", NullProvider(), test_cfg) == []

    def test_unlabeled_prompt_empty(self, plate_model, test_cfg):
        parts = segment_model(plate_model, "gear", OracleProvider(plate_model),
                              test_cfg)
        assert parts == []

    def test_empty_prompt_rejected(self, plate_model, test_cfg):
        with pytest.raises(ValueError):
            segment_model(plate_model, "  ", OracleProvider(plate_model), test_cfg)

    def test_cross_view_merge_provenance(self, plate_model, manifests, test_cfg):
        parts = segment_model(plate_model, "hole", OracleProvider(plate_model),
                              test_cfg)
        # Each through-hole wall is visible from top and bottom only.
        for part in parts:
            views = {prov[0] for prov in part.provenance}
            assert views == {"top", "bottom"}
            assert len(part.provenance) == 2

    def test_provider_failure_carries_view(self, plate_model, test_cfg):
        def boom(image, prompt, thr):
            raise ProviderUnavailable("backend down")
        with pytest.raises(ProviderUnavailable) as err:
            segment_model(plate_model, "hole", CallbackProvider(boom), test_cfg)
        assert err.value.view == "top"

    def test_score_threshold_behavior(self, plate_model, manifests, test_cfg):
        wall = manifests["plate4"]["holes"][0]["wall"]
        oracle = OracleProvider(plate_model)

        def scored(score):
            def fn(image, prompt, thr):
                masks = oracle.segment(image, "hole", thr)
                return [ScoredMask(m.mask, m.bbox, score) for m in masks[:1]]
            return fn

        kept_030 = segment_model(plate_model, "hole",
                                 CallbackProvider(scored(0.30)), test_cfg)
        kept_031 = segment_model(plate_model, "hole",
                                 CallbackProvider(scored(0.31)), test_cfg)
        dropped = segment_model(plate_model, "hole",
                                CallbackProvider(scored(0.29)), test_cfg)
        assert kept_030 and kept_031
        assert dropped == []

    def test_threshold_monotonicity(self, plate_model, test_cfg):
        oracle = OracleProvider(plate_model)
        scores = (0.2, 0.35, 0.5, 0.9)

        def varied(image, prompt, thr):
            masks = oracle.segment(image, "hole", thr)
            return [ScoredMask(m.mask, m.bbox, scores[i % len(scores)])
                    for i, m in enumerate(masks)]

        counts = []
        for threshold in (0.0, 0.25, 0.4, 0.6, 0.95):
            cfg = PipelineConfig(render_width=test_cfg.render_width,
                                 render_height=test_cfg.render_height,
                                 box_score_threshold=threshold)
            parts = segment_model(plate_model, "hole",
                                  CallbackProvider(varied), cfg)
            counts.append(sum(len(p.provenance) for p in parts))
        assert counts == sorted(counts, reverse=True)

    def test_parts_connected(self, blind_model, test_cfg):
        for prompt in ("hole", "blind hole", "through hole"):
            for part in segment_model(blind_model, prompt,
                                      OracleProvider(blind_model), test_cfg):
                comp = blind_model.adjacency.component(
                    min(part.face_ids), part.face_ids)
                assert comp == part.face_ids

    def test_oracle_round_trip_all_labels(self, blind_model, test_cfg):
        for prompt, ids in blind_model.labels.items():
            parts = segment_model(blind_model, prompt,
                                  OracleProvider(blind_model), test_cfg)
            expected = {frozenset(c) for c in
                        blind_model.adjacency.components(set(ids))}
            assert {p.face_ids for p in parts} == expected

    def test_eight_corner_view_set(self, plate_model, manifests, test_cfg):
        cfg = PipelineConfig(render_width=test_cfg.render_width,
                             render_height=test_cfg.render_height,
                             view_set="eight_corners")
        parts = segment_model(plate_model, "hole", OracleProvider(plate_model), cfg)
        assert {p.face_ids for p in parts} \
            == {frozenset({h["wall"]}) for h in manifests["plate4"]["holes"]}
        for part in parts:
            assert all(v.startswith("corner:") for v, _, _ in part.provenance)


class TestMergeDetections:
    def test_transitive_overlap(self):
        a = PartInstance(frozenset({1, 2}), [("top", 0, 1.0)])
        b = PartInstance(frozenset({2, 3}), [("bottom", 0, 1.0)])
        merged = merge_detections([a, b])
        assert len(merged) == 1
        assert merged[0].face_ids == frozenset({1, 2, 3})
        assert merged[0].provenance == [("top", 0, 1.0), ("bottom", 0, 1.0)]

    def test_disjoint_untouched(self):
        a = PartInstance(frozenset({1, 2}))
        b = PartInstance(frozenset({3, 4}))
        merged = merge_detections([a, b])
        assert [m.face_ids for m in merged] == [frozenset({1, 2}), frozenset({3, 4})]

    def test_identical_sets_merge(self):
        a = PartInstance(frozenset({5}), [("top", 0, 1.0)])
        b = PartInstance(frozenset({5}), [("corner:1", 2, 0.8)])
        merged = merge_detections([a, b])
        assert len(merged) == 1
        assert len(merged[0].provenance) == 2

    def test_idempotent(self):
        dets = [PartInstance(frozenset(s), [(f"v{i}", i, 1.0)])
                for i, s in enumerate([{1, 2}, {2, 3}, {7}, {8, 9}, {9, 10}])]
        once = merge_detections(dets)
        twice = merge_detections(once)
        assert [p.face_ids for p in once] == [p.face_ids for p in twice]
        assert [p.provenance for p in once] == [p.provenance for p in twice]

    @given(st.lists(st.frozensets(st.integers(0, 12), min_size=1), max_size=8))
    @settings(max_examples=50, deadline=None)
    def test_outputs_pairwise_disjoint(self, sets):
        merged = merge_detections([PartInstance(s) for s in sets])
        union = set()
        for part in merged:
            assert not (part.face_ids & union)
            union |= part.face_ids
        assert union == set().union(*sets) if sets else union == set()


class TestFilterBySides:
    def test_blind_hole_bottom_discarded(self, blind_model, test_cfg):
        oracle = OracleProvider(blind_model)
        blind = segment_model(blind_model, "blind hole", oracle, test_cfg)
        assert len(blind) == 1
        assert filter_by_sides(blind_model, blind, {"bottom"}, test_cfg) == []

    def test_blind_hole_top_retained(self, blind_model, test_cfg):
        oracle = OracleProvider(blind_model)
        blind = segment_model(blind_model, "blind hole", oracle, test_cfg)
        kept = filter_by_sides(blind_model, blind, {"top"}, test_cfg)
        assert [p.face_ids for p in kept] == [p.face_ids for p in blind]

    def test_all_sides_is_monotone(self, blind_model, test_cfg):
        oracle = OracleProvider(blind_model)
        parts = segment_model(blind_model, "hole", oracle, test_cfg)
        all_sides = {"top", "bottom", "left", "right", "front", "back"}
        kept = filter_by_sides(blind_model, parts, all_sides, test_cfg)
        assert {p.face_ids for p in kept} == {p.face_ids for p in parts}

    def test_retained_parts_visible_enough(self, blind_model, test_cfg):
        from cadqa.segment import rendered_view
        oracle = OracleProvider(blind_model)
        parts = segment_model(blind_model, "hole", oracle, test_cfg)
        for side in ("top", "bottom"):
            kept = filter_by_sides(blind_model, parts, {side}, test_cfg)
            buffers = rendered_view(blind_model, ViewSpec.main_axis(side), test_cfg)
            for part in kept:
                ids = np.asarray(sorted(part.face_ids), dtype=np.int32)
                px = int(np.count_nonzero(np.isin(buffers.face_id, ids)))
                assert px >= test_cfg.min_visibility_pixels

    def test_empty_sides_rejected(self, blind_model, test_cfg):
        with pytest.raises(ValueError):
            filter_by_sides(blind_model, [], set(), test_cfg)


class TestRle:
    def test_round_trip_plate_mask(self, top_buffers):
        mask = top_buffers.model_pixels()
        rle = encode_mask(mask)
        assert rle["size"] == [mask.shape[0], mask.shape[1]]
        assert np.array_equal(decode_mask(rle), mask)

    def test_starts_with_zero_run(self):
        mask = np.ones((2, 3), dtype=bool)
        rle = encode_mask(mask)
        assert rle["counts"] == [0, 6]

    @given(st.integers(0, 2**16 - 1), st.integers(1, 16), st.integers(1, 16))
    @settings(max_examples=80, deadline=None)
    def test_round_trip_random(self, seed, h, w):
        rng = np.random.default_rng(seed)
        mask = rng.random((h, w)) < 0.4
        assert np.array_equal(decode_mask(encode_mask(mask)), mask)

    def test_wrong_total_raises(self):
        with pytest.raises(ValueError):
            decode_mask({"size": [2, 2], "counts": [1]})
