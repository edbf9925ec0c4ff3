"""Low-precision attention: integer Q and K, FP8 P and V.

Q and K are quantized to symmetric per-block integers (K optionally smoothed by
subtracting its per-head mean first), Q K^T is formed on the integer codes and
rescaled, softmax runs in float64, and P and V are rounded to the configured
FP8 formats before the float64 P V product.
"""
from dataclasses import asdict, dataclass
from typing import Dict, Tuple

import numpy as np

from scenegen.attention.reference import attention_logits, attention_reference
from scenegen.attention.types import AttentionInputs
from scenegen.errors import ConfigurationError, InvariantViolation
from scenegen.numerics import Tensor, softmax

from .codecs import FloatFormat, IntFormat, qmax_for_bits, quantize_blocks, round_to_format


@dataclass(frozen=True)
class QuantScheme:
    q_format: IntFormat = IntFormat.INT8
    k_format: IntFormat = IntFormat.INT8
    p_format: FloatFormat = FloatFormat.FP8_E4M3
    v_format: FloatFormat = FloatFormat.FP8_E4M3
    k_smoothing: bool = True
    block_size: int = 32

    def __post_init__(self):
        for name, enum in (("q_format", IntFormat), ("k_format", IntFormat),
                           ("p_format", FloatFormat), ("v_format", FloatFormat)):
            try:
                object.__setattr__(self, name, enum(getattr(self, name)))
            except ValueError:
                raise ConfigurationError(f"unknown format {getattr(self, name)!r}", key=name)
        if self.p_format is FloatFormat.INT8:
            raise ConfigurationError("P is rounded without scaling; int8 is not available", key="p_format")
        if self.block_size < 1:
            raise ConfigurationError("block_size must be >= 1", key="block_size")

    @classmethod
    def full(cls) -> "QuantScheme":
        return cls(IntFormat.FULL, IntFormat.FULL, FloatFormat.FULL, FloatFormat.FULL, False)

    @property
    def is_full_precision(self) -> bool:
        return (
            self.q_format is IntFormat.FULL
            and self.k_format is IntFormat.FULL
            and self.p_format is FloatFormat.FULL
            and self.v_format is FloatFormat.FULL
            and not self.k_smoothing
        )

    def to_record(self) -> Dict:
        record = asdict(self)
        for key in ("q_format", "k_format", "p_format", "v_format"):
            record[key] = record[key].value
        return record


@dataclass(frozen=True)
class AccuracyReport:
    cosine_similarity: float
    relative_l1: float
    max_abs_err: float

    @classmethod
    def compare(cls, reference: Tensor, candidate: Tensor) -> "AccuracyReport":
        ref = reference.ravel()
        cand = candidate.ravel()
        diff = np.abs(ref - cand)
        ref_norm = np.linalg.norm(ref)
        cand_norm = np.linalg.norm(cand)
        if ref_norm == 0.0 and cand_norm == 0.0:
            cosine = 1.0
        elif ref_norm == 0.0 or cand_norm == 0.0:
            cosine = 0.0
        else:
            cosine = float(np.clip(np.dot(ref, cand) / (ref_norm * cand_norm), -1.0, 1.0))
        denom = float(np.mean(np.abs(ref)))
        rel = float(np.mean(diff)) / denom if denom > 0 else (0.0 if not np.any(diff) else float("inf"))
        return cls(cosine_similarity=cosine, relative_l1=rel, max_abs_err=float(np.max(diff, initial=0.0)))


def smooth_k(k: Tensor) -> Tuple[Tensor, Tensor]:
    """Subtract the per-head mean key; returns (k_centered, k_mean [.., heads, 1, dim])."""
    k_mean = np.mean(k, axis=-2, keepdims=True)
    return k - k_mean, k_mean


def _side(x: Tensor, fmt: IntFormat, block_size: int):
    if fmt is IntFormat.FULL:
        return x, None
    codes, row_scale = quantize_blocks(x, fmt.bits, block_size)
    return codes, row_scale


def quantized_logits(q: Tensor, k: Tensor, scheme: QuantScheme, scale: float) -> Tensor:
    if scheme.q_format is IntFormat.FULL and scheme.k_format is IntFormat.FULL:
        return attention_logits(q, k, scale)

    q_vals, q_scale = _side(q, scheme.q_format, scheme.block_size)
    k_vals, k_scale = _side(k, scheme.k_format, scheme.block_size)
    if q_scale is not None and k_scale is not None:
        # integer-domain product; exact while every partial sum fits a float64 mantissa
        bound = qmax_for_bits(scheme.q_format.bits) * qmax_for_bits(scheme.k_format.bits) * q.shape[-1]
        if bound >= 2 ** 53:
            raise InvariantViolation(f"integer QK^T bound {bound} exceeds exact float range")
        product = np.matmul(q_vals, np.swapaxes(k_vals, -1, -2)).astype(np.float64)
    else:
        product = np.matmul(q_vals.astype(np.float64), np.swapaxes(k_vals.astype(np.float64), -1, -2))
    if q_scale is not None:
        product = product * q_scale
    if k_scale is not None:
        product = product * np.swapaxes(k_scale, -1, -2)
    return product * scale


def quantized_attention(inp: AttentionInputs, scheme: QuantScheme) -> Tensor:
    """Attention output under `scheme`, without the accuracy comparison."""
    k = inp.k
    if scheme.k_smoothing:
        # the mean key shifts every logit row by a constant, which softmax ignores
        k, _ = smooth_k(k)
    p = softmax(quantized_logits(inp.q, k, scheme, inp.scale), axis=-1)
    p = round_to_format(p, scheme.p_format, scheme.block_size)
    v = round_to_format(inp.v, scheme.v_format, scheme.block_size)
    return np.matmul(p, v)


def sage_attention(inp: AttentionInputs, scheme: QuantScheme) -> Tuple[Tensor, AccuracyReport]:
    out = quantized_attention(inp, scheme)
    return out, AccuracyReport.compare(attention_reference(inp), out)
