from .hooks import AttentionCapture, BlockObserver, BlockTimer, RangeRecorder
from .profiler import KindTiming, collect_range_stats, profile_block_kinds, profile_records
from .reference import attention_logits, attention_reference
from .types import ALL_KINDS, AttentionInputs, BlockKind, RangeStats, TensorStats

__all__ = [
    "ALL_KINDS",
    "AttentionCapture",
    "AttentionInputs",
    "BlockKind",
    "BlockObserver",
    "BlockTimer",
    "KindTiming",
    "RangeRecorder",
    "RangeStats",
    "TensorStats",
    "attention_logits",
    "attention_reference",
    "collect_range_stats",
    "profile_block_kinds",
    "profile_records",
]
