"""Per-block-kind wall-time profiling of a model forward pass."""
import logging
import statistics
from dataclasses import dataclass
from typing import Dict, List

from scenegen.errors import ConfigurationError

from .hooks import BlockTimer, RangeRecorder
from .types import ALL_KINDS, BlockKind, RangeStats

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KindTiming:
    total_time: float
    share: float
    calls: int


def profile_block_kinds(model, sample_input, repetitions: int = 5) -> Dict[BlockKind, KindTiming]:
    """Median-of-repetitions block time per kind.

    `sample_input` is the positional argument tuple of `model.forward`. Blocks
    run serially inside one forward pass, so each block's time is attributed
    to exactly one kind. Kinds absent from the model report zero time.
    """
    if repetitions < 3:
        raise ConfigurationError("profiling needs at least 3 repetitions", key="repetitions")

    per_rep: List[Dict[BlockKind, float]] = []
    calls: Dict[BlockKind, int] = {}
    for _ in range(repetitions):
        timer = BlockTimer()
        with model.observe(timer):
            model.forward(*sample_input)
        per_rep.append(dict(timer.seconds))
        calls = dict(timer.calls)

    medians = {kind: statistics.median(rep[kind] for rep in per_rep) for kind in ALL_KINDS}
    total = sum(medians.values())
    report = {}
    for kind in ALL_KINDS:
        share = medians[kind] / total if total > 0 else 0.0
        report[kind] = KindTiming(total_time=medians[kind], share=share, calls=calls.get(kind, 0))

    logger.info(
        "block profile: %s",
        " ".join(f"{k.value}={v.total_time:.4f}s({v.share:.1%})" for k, v in report.items()),
    )
    return report


def profile_records(report: Dict[BlockKind, KindTiming]) -> List[Dict]:
    return [
        {"kind": kind.value, "total_time": t.total_time, "share": t.share, "calls": t.calls}
        for kind, t in report.items()
    ]


def collect_range_stats(model, sample_input) -> List[RangeStats]:
    """One RangeStats per attention invocation of a single forward pass."""
    recorder = RangeRecorder()
    with model.observe(recorder):
        model.forward(*sample_input)
    return recorder.records
