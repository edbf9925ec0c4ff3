from .calibration import record_trace, sweep_thresholds
from .conditioning import (
    BoxSpec,
    Conditioning,
    GridSpec,
    build_conditioning,
    encode_text_stub,
    rasterize_bev,
)
from .config import DEFAULT_PATTERN, DiTConfig
from .model import ToyDiT, measure_quant_accuracy
from .sampler import LatentDecoder, SampleResult, Sampler, guided_velocity, sample

__all__ = [
    "BoxSpec",
    "Conditioning",
    "DEFAULT_PATTERN",
    "DiTConfig",
    "GridSpec",
    "LatentDecoder",
    "SampleResult",
    "Sampler",
    "ToyDiT",
    "build_conditioning",
    "encode_text_stub",
    "guided_velocity",
    "measure_quant_accuracy",
    "rasterize_bev",
    "record_trace",
    "sample",
    "sweep_thresholds",
]
