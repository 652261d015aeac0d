from .config import PipelineConfig, VIEW_SETS
from .masks import ScoredMask
from .pipeline import (
    PartInstance,
    REJECTED,
    align_mask,
    filter_by_sides,
    merge_detections,
    rendered_view,
    segment_model,
    views_for_set,
)
from .providers import (
    CallbackProvider,
    NullProvider,
    OracleProvider,
    RemoteProvider,
    SegmentationProvider,
    resolve_provider,
)
from .rle import decode_mask, encode_mask

__all__ = [
    "PipelineConfig",
    "VIEW_SETS",
    "ScoredMask",
    "PartInstance",
    "REJECTED",
    "align_mask",
    "filter_by_sides",
    "merge_detections",
    "rendered_view",
    "segment_model",
    "views_for_set",
    "CallbackProvider",
    "NullProvider",
    "OracleProvider",
    "RemoteProvider",
    "SegmentationProvider",
    "resolve_provider",
    "decode_mask",
    "encode_mask",
]
