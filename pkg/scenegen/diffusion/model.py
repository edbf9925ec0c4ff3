"""Toy multiview video diffusion transformer.

Latents are [frames, views, channels, height, width]; inside the model they
are handled as tokens [frames, views, height, width, channels]. Every weight
is drawn from the seeded generator keyed by (seed, block index, parameter
name), so a config fully determines the model.
"""
import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional

import numpy as np

from scenegen.attention import AttentionCapture, AttentionInputs, BlockKind, BlockObserver, attention_reference
from scenegen.attention.quantization import AccuracyReport, QuantScheme, quantized_attention, sage_attention
from scenegen.caching import Modulation, modulated_input
from scenegen.errors import DimensionError, NumericFailureError
from scenegen.numerics import Tensor, derive_seed, layer_norm, seeded_normal, silu

from .config import DiTConfig

logger = logging.getLogger(__name__)

# token axes: 0 frames, 1 views, 2 height, 3 width
_GROUPING = {
    BlockKind.SPATIAL: ((0, 1), (2, 3)),
    BlockKind.TEMPORAL: ((1, 2, 3), (0,)),
    BlockKind.CROSS_VIEW: ((0, 2, 3), (1,)),
}


@dataclass
class BlockParams:
    kind: BlockKind
    w_ada_attn: Optional[Tensor]
    w_q: Optional[Tensor]
    w_k: Optional[Tensor]
    w_v: Optional[Tensor]
    w_o: Optional[Tensor]
    w_ada_mlp: Tensor
    w_fc1: Tensor
    w_fc2: Tensor


def timestep_features(t: float, dim: int) -> Tensor:
    """Sinusoidal features of t in [0, 1]; frequencies are at most 1 so neighbouring steps stay close."""
    half = dim // 2
    freqs = np.exp(-np.log(1000.0) * np.arange(half) / half)
    angles = t * freqs * 2.0 * np.pi
    return np.concatenate([np.cos(angles), np.sin(angles)])


def to_groups(x: Tensor, kind: BlockKind, heads: int) -> Tensor:
    """[F, V, H, W, C] -> [groups, heads, seq, head_dim] for a self-attention kind."""
    group_axes, seq_axes = _GROUPING[kind]
    order = group_axes + seq_axes + (4,)
    perm = np.transpose(x, order)
    groups = int(np.prod([x.shape[a] for a in group_axes]))
    seq = int(np.prod([x.shape[a] for a in seq_axes]))
    channels = x.shape[4]
    return perm.reshape(groups, seq, heads, channels // heads).transpose(0, 2, 1, 3)


def from_groups(o: Tensor, kind: BlockKind, token_shape) -> Tensor:
    group_axes, seq_axes = _GROUPING[kind]
    order = group_axes + seq_axes + (4,)
    permuted_shape = tuple(token_shape[a] for a in order)
    merged = o.transpose(0, 2, 1, 3).reshape(permuted_shape)
    return np.transpose(merged, np.argsort(order))


class ToyDiT:
    def __init__(self, config: DiTConfig, schemes: Optional[Dict[BlockKind, QuantScheme]] = None):
        self.config = config
        self.schemes: Dict[BlockKind, QuantScheme] = dict(schemes or {})
        self._observers: List[BlockObserver] = []

        c, e = config.channels, config.embed_dim
        self.w_t1 = self._param("time", "fc1", (e, e), 1.0 / np.sqrt(e))
        self.w_t2 = self._param("time", "fc2", (e, e), 1.0 / np.sqrt(e))
        self.w_in = self._param("input", "proj", (c, c), 1.0 / np.sqrt(c))
        self.input_modulation = Modulation(
            w_scale=self._param("input", "mod_scale", (e, c), 0.1 / np.sqrt(e)),
            w_shift=self._param("input", "mod_shift", (e, c), 0.1 / np.sqrt(e)),
        )
        self.blocks = [self._build_block(i, kind) for i, kind in enumerate(config.block_kinds)]
        self.w_final_ada = self._param("final", "ada", (e, 2 * c), 0.1 / np.sqrt(e))
        self.w_out = self._param("final", "proj", (c, c), 0.5 / np.sqrt(c))

    def _param(self, scope, name: str, shape, std: float) -> Tensor:
        return std * seeded_normal(shape, derive_seed(self.config.seed, scope, name))

    def _build_block(self, index: int, kind: BlockKind) -> BlockParams:
        c, e, hidden = self.config.channels, self.config.embed_dim, self.config.channels * self.config.mlp_ratio
        scope = f"block{index}"
        attn = {}
        if kind is not BlockKind.OTHER:
            kv_in = self.config.cond_dim if kind is BlockKind.CROSS else c
            attn = dict(
                w_ada_attn=self._param(scope, "ada_attn", (e, 3 * c), 0.1 / np.sqrt(e)),
                w_q=self._param(scope, "q", (c, c), 1.0 / np.sqrt(c)),
                w_k=self._param(scope, "k", (kv_in, c), 1.0 / np.sqrt(kv_in)),
                w_v=self._param(scope, "v", (kv_in, c), 1.0 / np.sqrt(kv_in)),
                w_o=self._param(scope, "o", (c, c), 1.0 / np.sqrt(c)),
            )
        else:
            attn = dict(w_ada_attn=None, w_q=None, w_k=None, w_v=None, w_o=None)
        return BlockParams(
            kind=kind,
            w_ada_mlp=self._param(scope, "ada_mlp", (e, 3 * c), 0.1 / np.sqrt(e)),
            w_fc1=self._param(scope, "fc1", (c, hidden), 1.0 / np.sqrt(c)),
            w_fc2=self._param(scope, "fc2", (hidden, c), 1.0 / np.sqrt(hidden)),
            **attn,
        )

    @contextmanager
    def observe(self, observer: BlockObserver) -> Iterator[BlockObserver]:
        self._observers.append(observer)
        try:
            yield observer
        finally:
            self._observers.remove(observer)

    def timestep_embedding(self, t: float) -> Tensor:
        return silu(timestep_features(t, self.config.embed_dim) @ self.w_t1) @ self.w_t2

    def modulated_tokens(self, z: Tensor, emb: Tensor) -> Tensor:
        """Input projection followed by the timestep modulation layer; the cache measures distances here."""
        if z.shape != self.config.latent_shape:
            raise DimensionError(f"latent shape {z.shape} != {self.config.latent_shape}")
        tokens = np.transpose(z, (0, 1, 3, 4, 2)) @ self.w_in
        return modulated_input(tokens, emb, self.input_modulation)

    def head(self, hidden: Tensor, emb: Tensor) -> Tensor:
        shift, scale = np.split(emb @ self.w_final_ada, 2)
        out = (layer_norm(hidden) * (1.0 + scale) + shift) @ self.w_out
        return np.transpose(out, (0, 1, 4, 2, 3))

    def _attend(self, kind: BlockKind, q: Tensor, k: Tensor, v: Tensor) -> Tensor:
        inputs = AttentionInputs(q, k, v)
        scheme = self.schemes.get(kind)
        if scheme is None:
            return attention_reference(inputs)
        return quantized_attention(inputs, scheme)

    def _attention(self, index: int, p: BlockParams, x: Tensor, cond: Optional[Tensor]) -> Tensor:
        heads = self.config.heads
        if p.kind is BlockKind.CROSS:
            f, v_, h, w, c = x.shape
            q = (x @ p.w_q).reshape(f * v_, h * w, heads, c // heads).transpose(0, 2, 1, 3)
            ctx = np.zeros((1, self.config.cond_dim)) if cond is None else cond
            k = (ctx @ p.w_k).reshape(-1, heads, c // heads).transpose(1, 0, 2)
            vv = (ctx @ p.w_v).reshape(-1, heads, c // heads).transpose(1, 0, 2)
            k = np.broadcast_to(k, (q.shape[0],) + k.shape)
            vv = np.broadcast_to(vv, (q.shape[0],) + vv.shape)
            for observer in self._observers:
                observer.on_attention(index, p.kind, q, k, vv)
            o = self._attend(p.kind, q, k, vv)
            out = o.transpose(0, 2, 1, 3).reshape(x.shape)
        else:
            q = to_groups(x @ p.w_q, p.kind, heads)
            k = to_groups(x @ p.w_k, p.kind, heads)
            vv = to_groups(x @ p.w_v, p.kind, heads)
            for observer in self._observers:
                observer.on_attention(index, p.kind, q, k, vv)
            out = from_groups(self._attend(p.kind, q, k, vv), p.kind, x.shape)
        return out @ p.w_o

    def _block(self, index: int, p: BlockParams, h: Tensor, emb: Tensor, cond: Optional[Tensor]) -> Tensor:
        if p.w_ada_attn is not None:
            shift, scale, gate = np.split(emb @ p.w_ada_attn, 3)
            x = layer_norm(h) * (1.0 + scale) + shift
            h = h + (1.0 + gate) * self._attention(index, p, x, cond)
        shift, scale, gate = np.split(emb @ p.w_ada_mlp, 3)
        x = layer_norm(h) * (1.0 + scale) + shift
        return h + (1.0 + gate) * (silu(x @ p.w_fc1) @ p.w_fc2)

    def run_blocks(self, hidden: Tensor, emb: Tensor, cond: Optional[Tensor], step: Optional[int] = None) -> Tensor:
        h = hidden
        for index, p in enumerate(self.blocks):
            start = time.perf_counter()
            h = self._block(index, p, h, emb, cond)
            elapsed = time.perf_counter() - start
            for observer in self._observers:
                observer.on_block(index, p.kind, elapsed)
            if not np.all(np.isfinite(h)):
                raise NumericFailureError(step if step is not None else -1, f"{index}:{p.kind.value}")
        return h

    def forward(self, z: Tensor, t: float, cond: Optional[Tensor]) -> Tensor:
        """Velocity prediction for latent z at time t; `cond` None means the null sequence."""
        emb = self.timestep_embedding(t)
        return self.head(self.run_blocks(self.modulated_tokens(z, emb), emb, cond), emb)

    def sample_input(self, cond: Optional[Tensor], t: float = 0.5):
        """Positional arguments of `forward` on the seeded initial noise, for profiling."""
        z = seeded_normal(self.config.latent_shape, derive_seed(self.config.seed, "noise"))
        return z, t, cond


def measure_quant_accuracy(model: ToyDiT, sample_input, schemes: Dict[BlockKind, QuantScheme]) -> Dict[BlockKind, AccuracyReport]:
    """AccuracyReport of each configured kind on its first attention call in one forward pass."""
    capture = AttentionCapture(kinds=schemes.keys(), limit=1)
    with model.observe(capture):
        model.forward(*sample_input)
    reports = {}
    for kind, calls in capture.captured.items():
        q, k, v = calls[0]
        _, reports[kind] = sage_attention(AttentionInputs(q, k, v), schemes[kind])
        logger.info("quantized %s attention: cos=%.5f rel_l1=%.4f", kind.value,
                    reports[kind].cosine_similarity, reports[kind].relative_l1)
    return reports
