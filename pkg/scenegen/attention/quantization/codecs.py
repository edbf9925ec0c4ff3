"""Integer and FP8 codecs, emulated inside float64 tensors.

Integer codes are symmetric (zero point 0) with one scale per block of
`block_size` rows along the sequence axis. FP8 values are produced by
rounding to the nearest representable value of the format (ties to even),
saturating at the largest finite value, with subnormals.
"""
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple

import numpy as np

from scenegen.errors import ConfigurationError
from scenegen.numerics import Tensor, as_tensor


class IntFormat(str, Enum):
    INT8 = "int8"
    INT4 = "int4"
    FULL = "full"

    @property
    def bits(self) -> int:
        return {IntFormat.INT8: 8, IntFormat.INT4: 4}[self]


class FloatFormat(str, Enum):
    FP8_E4M3 = "fp8_e4m3"
    FP8_E5M2 = "fp8_e5m2"
    # symmetric per-block int8, emulated like the Q/K path
    INT8 = "int8"
    FULL = "full"


@dataclass(frozen=True)
class Fp8Spec:
    exponent_bits: int
    mantissa_bits: int
    bias: int
    max_finite: float

    @property
    def min_normal_exponent(self) -> int:
        return 1 - self.bias


E4M3 = Fp8Spec(exponent_bits=4, mantissa_bits=3, bias=7, max_finite=448.0)
E5M2 = Fp8Spec(exponent_bits=5, mantissa_bits=2, bias=15, max_finite=57344.0)

FP8_SPECS = {FloatFormat.FP8_E4M3: E4M3, FloatFormat.FP8_E5M2: E5M2}


@dataclass
class QuantizedBlock:
    codes: np.ndarray
    scale: float
    zero_point: int = 0

    def dequantize(self) -> Tensor:
        return self.codes.astype(np.float64) * self.scale


def qmax_for_bits(bits: int) -> int:
    if bits not in (4, 8):
        raise ConfigurationError(f"unsupported integer width {bits}", key="bits")
    return 2 ** (bits - 1) - 1


def round_half_away(x: Tensor) -> Tensor:
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def _as_rows(x: Tensor) -> Tensor:
    # rank-1 input is a sequence of scalars: one row per element
    return x[:, None] if x.ndim == 1 else x


def quantize_blocks(x: Tensor, bits: int, block_size: int) -> Tuple[np.ndarray, Tensor]:
    """Vectorized codec. Returns (int64 codes shaped like x, per-row scales [..., seq, 1])."""
    if block_size < 1:
        raise ConfigurationError("block_size must be >= 1", key="block_size")
    qmax = qmax_for_bits(bits)
    rows = _as_rows(as_tensor(x))
    seq = rows.shape[-2]

    row_amax = np.max(np.abs(rows), axis=-1)
    starts = np.arange(0, seq, block_size)
    block_amax = np.maximum.reduceat(row_amax, starts, axis=-1)
    zero = block_amax == 0.0
    scale = np.where(zero, 1.0, block_amax / qmax)
    inv = np.where(zero, 1.0, qmax / np.where(zero, 1.0, block_amax))

    row_block = np.arange(seq) // block_size
    row_scale = scale[..., row_block][..., None]
    row_inv = inv[..., row_block][..., None]
    codes = np.clip(round_half_away(rows * row_inv), -qmax, qmax).astype(np.int64)
    if x.ndim == 1:
        codes = codes[:, 0]
    return codes, row_scale


def quantize_symmetric(x: Tensor, bits: int, block_size: int = 32) -> List[QuantizedBlock]:
    """Per-block symmetric quantization along the sequence axis.

    For rank >= 2 inputs the sequence axis is the second to last and a block
    spans `block_size` full rows; rank-1 inputs are split into consecutive
    runs of `block_size` elements. Blocks are listed in row-major order of the
    leading axes, then by position along the sequence.
    """
    x = as_tensor(x)
    codes, row_scale = quantize_blocks(x, bits, block_size)
    rows = _as_rows(codes)
    scales = row_scale[..., 0]
    lead = rows.shape[:-2]
    seq = rows.shape[-2]
    blocks = []
    for idx in np.ndindex(*lead):
        for start in range(0, seq, block_size):
            chunk = rows[idx + (slice(start, start + block_size),)]
            if x.ndim == 1:
                chunk = chunk[:, 0]
            blocks.append(QuantizedBlock(codes=chunk.copy(), scale=float(scales[idx + (start,)])))
    return blocks


def dequantize_blocks(codes: np.ndarray, row_scale: Tensor) -> Tensor:
    rows = _as_rows(codes).astype(np.float64) * row_scale
    return rows[:, 0] if codes.ndim == 1 else rows


def fp8_round(x: Tensor, fmt: FloatFormat) -> Tensor:
    spec = FP8_SPECS[FloatFormat(fmt)]
    x = as_tensor(x)
    a = np.abs(x)
    _, e = np.frexp(a)
    # frexp gives a = f * 2**e with f in [0.5, 1)
    exponent = np.maximum(e - 1, spec.min_normal_exponent)
    ulp = np.ldexp(1.0, exponent - spec.mantissa_bits)
    rounded = np.minimum(np.round(a / ulp) * ulp, spec.max_finite)
    return np.copysign(rounded, x)


def fp8_decode(code: int, fmt: FloatFormat) -> float:
    """Value of one 8-bit code; NaN for NaN codes, +/-inf for E5M2 infinities."""
    spec = FP8_SPECS[FloatFormat(fmt)]
    mbits = spec.mantissa_bits
    sign = -1.0 if (code >> 7) & 1 else 1.0
    exp_field = (code >> mbits) & ((1 << spec.exponent_bits) - 1)
    mant = code & ((1 << mbits) - 1)
    top = (1 << spec.exponent_bits) - 1
    if spec is E4M3 and exp_field == top and mant == (1 << mbits) - 1:
        return float("nan")
    if spec is E5M2 and exp_field == top:
        return sign * float("inf") if mant == 0 else float("nan")
    if exp_field == 0:
        return sign * mant / (1 << mbits) * 2.0 ** (1 - spec.bias)
    return sign * (1.0 + mant / (1 << mbits)) * 2.0 ** (exp_field - spec.bias)


def fp8_code_points(fmt: FloatFormat) -> np.ndarray:
    """All finite values of the format, one per code (both zeros included)."""
    values = [fp8_decode(code, fmt) for code in range(256)]
    return np.array([v for v in values if np.isfinite(v)])


def round_to_format(x: Tensor, fmt: FloatFormat, block_size: int = 32) -> Tensor:
    fmt = FloatFormat(fmt)
    if fmt is FloatFormat.FULL:
        return x
    if fmt is FloatFormat.INT8:
        codes, row_scale = quantize_blocks(x, 8, block_size)
        return dequantize_blocks(codes, row_scale)
    return fp8_round(x, fmt)
