"""Pipeline thresholds and view-set configuration."""

from __future__ import annotations

from dataclasses import dataclass

VIEW_SETS = ("six_main_axes", "eight_corners")

# Defaults measured as optimal in the ablations: 0.30 box-score threshold,
# 45% whole-model mask filter, 5% per-face coverage, six main-axis views.
BOX_SCORE_THRESHOLD = 0.30
MAX_MASK_MODEL_COVERAGE = 0.45
MIN_FACE_COVERAGE = 0.05


@dataclass
class PipelineConfig:
    box_score_threshold: float = BOX_SCORE_THRESHOLD
    max_mask_model_coverage: float = MAX_MASK_MODEL_COVERAGE
    min_face_coverage: float = MIN_FACE_COVERAGE
    view_set: str = "six_main_axes"
    render_width: int = 1920
    render_height: int = 1080
    min_visibility_pixels: int = 10

    def __post_init__(self):
        for name in ("box_score_threshold", "max_mask_model_coverage",
                     "min_face_coverage"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")
        if self.view_set not in VIEW_SETS:
            raise ValueError(f"view_set must be one of {VIEW_SETS}")
        if self.render_width <= 0 or self.render_height <= 0:
            raise ValueError("render resolution must be positive")
        if self.min_visibility_pixels < 1:
            raise ValueError("min_visibility_pixels must be >= 1")
