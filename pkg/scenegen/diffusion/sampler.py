"""Rectified-flow Euler sampling with classifier-free guidance through the step cache."""
import logging
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from tqdm import tqdm

from scenegen.attention import BlockTimer, BlockKind
from scenegen.attention.quantization import QuantScheme
from scenegen.caching import Branch, CachePolicy, CacheState, cached_forward
from scenegen.caching.decisions import EvaluationListener
from scenegen.errors import NumericFailureError
from scenegen.numerics import Tensor, derive_seed, seeded_normal, sigmoid

from .conditioning import Conditioning
from .config import DiTConfig
from .model import ToyDiT, measure_quant_accuracy

logger = logging.getLogger(__name__)


def guided_velocity(uncond: Tensor, cond: Tensor, weight: float) -> Tensor:
    """uncond + w (cond - uncond), written so w = 0 and w = 1 are exact."""
    return (1.0 - weight) * uncond + weight * cond


class LatentDecoder:
    """Fixed seeded linear map channels -> RGB, sigmoid, nearest-neighbour upsampling."""

    def __init__(self, config: DiTConfig):
        self.upsample = config.decode_upsample
        self.weight = seeded_normal((config.channels, 3), derive_seed(config.seed, "decoder")) / np.sqrt(config.channels)

    def decode(self, z: Tensor) -> List[List[Tensor]]:
        rgb = sigmoid(np.transpose(z, (0, 1, 3, 4, 2)) @ self.weight)
        if self.upsample > 1:
            rgb = rgb.repeat(self.upsample, axis=2).repeat(self.upsample, axis=3)
        return [[rgb[f, v] for v in range(rgb.shape[1])] for f in range(rgb.shape[0])]


@dataclass
class SampleResult:
    latent: Tensor
    frames: List[List[Tensor]]
    state: CacheState
    seconds: float
    block_timings: Dict[str, Dict[str, float]] = field(default_factory=dict)

    def run_report(self) -> Dict:
        return {
            "seconds": self.seconds,
            "cache": self.state.counters(),
            "block_timings": self.block_timings,
        }


class Sampler:
    def __init__(self, model: ToyDiT, show_progress: bool = False, listener: Optional[EvaluationListener] = None):
        self.model = model
        self.config = model.config
        self.show_progress = show_progress
        self.listener = listener

    @property
    def dt(self) -> float:
        return 1.0 / self.config.steps if self.config.steps else 0.0

    def timestep(self, step: int) -> float:
        return step * self.dt

    def initial_latent(self) -> Tensor:
        return seeded_normal(self.config.latent_shape, derive_seed(self.config.seed, "noise"))

    def denoise_step(self, z: Tensor, step: int, cond: Conditioning, policy: CachePolicy, state: CacheState) -> Tensor:
        t = self.timestep(step)
        uncond_out = cached_forward(self.model, z, t, cond.unconditional(), state, policy,
                                    step=step, branch=Branch.UNCONDITION, listener=self.listener)
        cond_out = cached_forward(self.model, z, t, cond.combined, state, policy,
                                  step=step, branch=Branch.CONDITION, listener=self.listener)
        z_next = z + guided_velocity(uncond_out, cond_out, self.config.guidance_weight) * self.dt
        if not np.all(np.isfinite(z_next)):
            raise NumericFailureError(step, "euler_update")
        return z_next

    def run(self, cond: Conditioning, policy: Optional[CachePolicy] = None, z0: Optional[Tensor] = None) -> SampleResult:
        steps = self.config.steps
        if policy is None:
            policy = CachePolicy.disabled(steps)
        elif policy.total_steps != steps:
            policy = policy.for_steps(steps)
        state = CacheState()
        timer = BlockTimer()
        z = self.initial_latent() if z0 is None else z0
        start = time.perf_counter()
        with self.model.observe(timer):
            for step in tqdm(range(steps), desc="sampling", disable=not self.show_progress, leave=False):
                z = self.denoise_step(z, step, cond, policy, state)
        seconds = time.perf_counter() - start
        frames = LatentDecoder(self.config).decode(z)
        timings = {
            kind.value: {"seconds": timer.seconds[kind], "calls": timer.calls[kind]}
            for kind in timer.seconds
        }
        logger.info("sampled %d steps in %.2fs, cache %s", steps, seconds, state.counters())
        return SampleResult(latent=z, frames=frames, state=state, seconds=seconds, block_timings=timings)


def sample(
    config: DiTConfig,
    cond: Conditioning,
    policy: Optional[CachePolicy] = None,
    schemes: Optional[Dict[BlockKind, QuantScheme]] = None,
    show_progress: bool = False,
):
    """Run the full sampler and decode; returns (frames, run_report)."""
    model = ToyDiT(config, schemes=schemes)
    result = Sampler(model, show_progress=show_progress).run(cond, policy)
    report = result.run_report()
    if schemes:
        accuracy = measure_quant_accuracy(model, model.sample_input(cond.combined), schemes)
        report["quantization"] = {kind.value: vars(r) for kind, r in accuracy.items()}
    return result.frames, report
