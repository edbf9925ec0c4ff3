"""Trace recording and threshold sweeps; both drive the sampler."""
import logging
from typing import Dict, List, Optional, Sequence, Tuple

from scenegen.caching import (
    Branch,
    CachePolicy,
    CalibrationTrace,
    SweepRow,
    TraceEntry,
    relative_distance,
)
from scenegen.numerics import Tensor

from .conditioning import Conditioning
from .model import ToyDiT
from .sampler import Sampler

logger = logging.getLogger(__name__)


class _TraceListener:
    def __init__(self):
        self.previous: Dict[Branch, Tuple[Tensor, Tensor]] = {}
        self.entries: List[TraceEntry] = []

    def __call__(self, step: int, branch: Branch, modulated: Tensor, output: Tensor) -> None:
        if branch in self.previous:
            prev_in, prev_out = self.previous[branch]
            self.entries.append(
                TraceEntry(
                    step=step,
                    branch=branch,
                    input_distance=relative_distance(prev_in, modulated),
                    output_distance=relative_distance(prev_out, output),
                )
            )
        self.previous[branch] = (modulated, output)


def record_trace(model: ToyDiT, cond: Conditioning, z0: Optional[Tensor] = None) -> CalibrationTrace:
    """Consecutive-step input/output distances of both branches, cache disabled."""
    listener = _TraceListener()
    Sampler(model, listener=listener).run(cond, CachePolicy.disabled(model.config.steps), z0=z0)
    logger.info("recorded %d trace pairs over %d steps", len(listener.entries), model.config.steps)
    return CalibrationTrace(listener.entries)


def sweep_thresholds(
    model: ToyDiT,
    cond: Conditioning,
    thresholds: Sequence[float],
    policy: CachePolicy,
) -> List[SweepRow]:
    """Sample once per threshold and measure reuse and final-latent drift against the uncached run."""
    sampler = Sampler(model)
    baseline = sampler.run(cond, CachePolicy.disabled(model.config.steps))
    rows = []
    for threshold in thresholds:
        result = sampler.run(cond, policy.with_threshold(threshold))
        governed = [b for b in Branch if policy.governs(b)]
        rows.append(
            SweepRow(
                threshold=float(threshold),
                computed_steps=sum(result.state[b].computed_steps for b in governed),
                reused_steps=sum(result.state[b].reused_steps for b in governed),
                drift=relative_distance(baseline.latent, result.latent),
                seconds=result.seconds,
            )
        )
        logger.info("threshold %.4f: reuse %.0f%%, drift %.4f", threshold, 100 * rows[-1].reuse_fraction, rows[-1].drift)
    return rows
