from dataclasses import asdict, dataclass
from enum import Enum
from typing import Dict, Optional

import numpy as np

from scenegen.errors import DimensionError
from scenegen.numerics import Tensor, as_tensor


class BlockKind(str, Enum):
    SPATIAL = "spatial"
    TEMPORAL = "temporal"
    CROSS_VIEW = "cross_view"
    # attention from latent tokens to the conditioning sequence
    CROSS = "cross"
    # blocks without attention (modulated MLP only)
    OTHER = "other"


ALL_KINDS = tuple(BlockKind)


@dataclass
class AttentionInputs:
    """Q [.., heads, seq, dim], K/V [.., heads, seq_kv, dim]; leading batch axes allowed."""

    q: Tensor
    k: Tensor
    v: Tensor
    scale: Optional[float] = None

    def __post_init__(self):
        self.q = as_tensor(self.q)
        self.k = as_tensor(self.k)
        self.v = as_tensor(self.v)
        if self.q.ndim < 3 or self.k.ndim != self.q.ndim or self.v.ndim != self.q.ndim:
            raise DimensionError(
                f"q, k, v must share rank >= 3, got {self.q.ndim}, {self.k.ndim}, {self.v.ndim}"
            )
        if self.q.shape[:-2] != self.k.shape[:-2] or self.k.shape[:-2] != self.v.shape[:-2]:
            raise DimensionError(
                f"batch/head axes differ: q {self.q.shape}, k {self.k.shape}, v {self.v.shape}"
            )
        if self.q.shape[-1] != self.k.shape[-1]:
            raise DimensionError(f"q dim {self.q.shape[-1]} != k dim {self.k.shape[-1]}")
        if self.k.shape[-2] != self.v.shape[-2]:
            raise DimensionError(f"k seq {self.k.shape[-2]} != v seq {self.v.shape[-2]}")
        if self.scale is None:
            self.scale = 1.0 / float(np.sqrt(self.q.shape[-1]))


@dataclass(frozen=True)
class TensorStats:
    min: float
    max: float
    mean: float
    std: float

    @classmethod
    def of(cls, x: Tensor) -> "TensorStats":
        return cls(float(np.min(x)), float(np.max(x)), float(np.mean(x)), float(np.std(x)))

    @property
    def range(self) -> float:
        return self.max - self.min


@dataclass(frozen=True)
class RangeStats:
    """Value ranges of Q, K, V for one attention invocation."""

    kind: BlockKind
    block_index: int
    q: TensorStats
    k: TensorStats
    v: TensorStats

    def to_record(self) -> Dict:
        return {
            "kind": self.kind.value,
            "block_index": self.block_index,
            "q": asdict(self.q),
            "k": asdict(self.k),
            "v": asdict(self.v),
        }
