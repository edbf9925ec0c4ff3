from typing import Dict, List

import numpy as np

from scenegen.numerics import Tensor

from .types import ALL_KINDS, BlockKind, RangeStats, TensorStats


class BlockObserver:
    """Receives callbacks from the model; subclasses override what they need."""

    def on_attention(self, block_index: int, kind: BlockKind, q: Tensor, k: Tensor, v: Tensor) -> None:
        pass

    def on_block(self, block_index: int, kind: BlockKind, seconds: float) -> None:
        pass


class BlockTimer(BlockObserver):
    """Accumulates wall time and invocation counts per block kind."""

    def __init__(self):
        self.seconds: Dict[BlockKind, float] = {kind: 0.0 for kind in ALL_KINDS}
        self.calls: Dict[BlockKind, int] = {kind: 0 for kind in ALL_KINDS}

    def on_block(self, block_index: int, kind: BlockKind, seconds: float) -> None:
        self.seconds[kind] += seconds
        self.calls[kind] += 1


class RangeRecorder(BlockObserver):
    def __init__(self):
        self.records: List[RangeStats] = []

    def on_attention(self, block_index: int, kind: BlockKind, q: Tensor, k: Tensor, v: Tensor) -> None:
        self.records.append(
            RangeStats(
                kind=kind,
                block_index=block_index,
                q=TensorStats.of(q),
                k=TensorStats.of(k),
                v=TensorStats.of(v),
            )
        )


class AttentionCapture(BlockObserver):
    """Keeps copies of the Q/K/V of chosen block kinds (one entry per invocation)."""

    def __init__(self, kinds=ALL_KINDS, limit: int = 1):
        self.kinds = set(kinds)
        self.limit = limit
        self.captured: Dict[BlockKind, List[tuple]] = {}

    def on_attention(self, block_index: int, kind: BlockKind, q: Tensor, k: Tensor, v: Tensor) -> None:
        if kind not in self.kinds:
            return
        bucket = self.captured.setdefault(kind, [])
        if len(bucket) < self.limit:
            bucket.append((np.array(q), np.array(k), np.array(v)))
