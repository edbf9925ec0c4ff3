import unittest
from contextlib import contextmanager
from unittest.mock import patch

import numpy as np
from numpy.testing import assert_allclose

from scenegen.attention import (
    ALL_KINDS,
    AttentionInputs,
    BlockKind,
    attention_reference,
    collect_range_stats,
    profile_block_kinds,
    profile_records,
)
from scenegen.diffusion import DiTConfig, ToyDiT
from scenegen.errors import ConfigurationError, DimensionError
from scenegen.numerics import seeded_normal


def naive_attention(q, k, v, scale):
    heads, seq, _ = q.shape
    out = np.zeros((heads, seq, v.shape[-1]))
    for h in range(heads):
        for i in range(seq):
            logits = [scale * sum(q[h, i, d] * k[h, j, d] for d in range(q.shape[-1])) for j in range(k.shape[1])]
            m = max(logits)
            weights = [np.exp(l - m) for l in logits]
            total = sum(weights)
            for j in range(k.shape[1]):
                out[h, i] += weights[j] / total * v[h, j]
    return out


class ScriptedModel:
    """Stands in for the transformer: replays fixed block times and attention tensors."""

    def __init__(self, blocks):
        self.blocks = blocks
        self._observers = []

    @contextmanager
    def observe(self, observer):
        self._observers.append(observer)
        try:
            yield observer
        finally:
            self._observers.remove(observer)

    def forward(self, *args):
        for index, (kind, seconds, qkv) in enumerate(self.blocks):
            for observer in self._observers:
                if qkv is not None:
                    observer.on_attention(index, kind, *qkv)
                observer.on_block(index, kind, seconds)


def small_config(**overrides):
    params = dict(num_views=2, frames=2, latent_height=2, latent_width=3, channels=8, heads=2, depth=4,
                  steps=2, embed_dim=8, cond_dim=8, mlp_ratio=1, decode_upsample=1)
    params.update(overrides)
    return DiTConfig(**params)


class TestAttentionReference(unittest.TestCase):

    def test_single_key_returns_value_row(self):
        q, k, v = seeded_normal((2, 1, 4), 1), seeded_normal((2, 1, 4), 2), seeded_normal((2, 1, 4), 3)
        out = attention_reference(AttentionInputs(q, k, v))
        np.testing.assert_array_equal(out, v)

    def test_identical_keys_average_values(self):
        q = seeded_normal((1, 3, 4), 1)
        k = np.repeat(seeded_normal((1, 1, 4), 2), 5, axis=1)
        v = seeded_normal((1, 5, 4), 3)
        out = attention_reference(AttentionInputs(q, k, v))
        assert_allclose(out, np.broadcast_to(v.mean(axis=1, keepdims=True), out.shape), atol=1e-12)

    def test_matches_naive_oracle(self):
        q, k, v = seeded_normal((2, 5, 8), 4), seeded_normal((2, 5, 8), 5), seeded_normal((2, 5, 8), 6)
        inp = AttentionInputs(q, k, v)
        expected = naive_attention(q, k, v, inp.scale)
        out = attention_reference(inp)
        self.assertLess(np.abs(out - expected).sum() / np.abs(expected).sum(), 1e-10)

    def test_rows_inside_value_envelope(self):
        q, k, v = seeded_normal((2, 6, 4), 7), seeded_normal((2, 9, 4), 8), seeded_normal((2, 9, 4), 9)
        out = attention_reference(AttentionInputs(q, k, v))
        lo = v.min(axis=1, keepdims=True)
        hi = v.max(axis=1, keepdims=True)
        self.assertTrue(np.all(out >= lo - 1e-12) and np.all(out <= hi + 1e-12))

    def test_chunked_batches_match_whole_batch(self):
        inp = AttentionInputs(seeded_normal((3, 2, 6, 4), 10), seeded_normal((3, 2, 7, 4), 11),
                              seeded_normal((3, 2, 7, 5), 12))
        whole = attention_reference(inp)
        with patch("scenegen.attention.reference.CHUNK_ELEMENTS", 1):
            sliced = attention_reference(inp)
        self.assertEqual(sliced.shape, (3, 2, 6, 5))
        assert_allclose(sliced, whole, rtol=0, atol=1e-14)

    def test_default_scale(self):
        inp = AttentionInputs(np.ones((1, 2, 16)), np.ones((1, 2, 16)), np.ones((1, 2, 16)))
        self.assertAlmostEqual(inp.scale, 0.25)

    def test_shape_mismatch(self):
        with self.assertRaises(DimensionError):
            AttentionInputs(np.ones((1, 2, 4)), np.ones((1, 3, 5)), np.ones((1, 3, 4)))
        with self.assertRaises(DimensionError):
            AttentionInputs(np.ones((1, 2, 4)), np.ones((1, 3, 4)), np.ones((1, 2, 4)))


class TestProfiler(unittest.TestCase):

    def test_spatial_only_model_has_full_share(self):
        model = ToyDiT(small_config(block_pattern=[BlockKind.SPATIAL], depth=2))
        report = profile_block_kinds(model, model.sample_input(None), repetitions=3)
        self.assertAlmostEqual(report[BlockKind.SPATIAL].share, 1.0)
        self.assertEqual(report[BlockKind.SPATIAL].calls, 2)
        for kind in ALL_KINDS:
            if kind is not BlockKind.SPATIAL:
                self.assertEqual(report[kind].total_time, 0.0)

    def test_shares_sum_to_one(self):
        model = ToyDiT(small_config())
        report = profile_block_kinds(model, model.sample_input(np.ones((3, 8))), repetitions=3)
        self.assertAlmostEqual(sum(t.share for t in report.values()), 1.0, delta=1e-6)
        records = profile_records(report)
        self.assertEqual({r["kind"] for r in records}, {k.value for k in ALL_KINDS})

    def test_longer_kind_gets_larger_share(self):
        model = ScriptedModel([(BlockKind.SPATIAL, 0.01, None), (BlockKind.CROSS_VIEW, 0.04, None)])
        report = profile_block_kinds(model, (), repetitions=3)
        self.assertGreater(report[BlockKind.CROSS_VIEW].share, report[BlockKind.SPATIAL].share)
        self.assertAlmostEqual(report[BlockKind.CROSS_VIEW].share, 0.8)

    def test_too_few_repetitions(self):
        with self.assertRaises(ConfigurationError):
            profile_block_kinds(ScriptedModel([]), (), repetitions=2)


class TestRangeStats(unittest.TestCase):

    def test_one_record_per_attention_block(self):
        config = small_config(block_pattern=[BlockKind.SPATIAL, BlockKind.OTHER, BlockKind.TEMPORAL], depth=6)
        model = ToyDiT(config)
        stats = collect_range_stats(model, model.sample_input(None))
        self.assertEqual(len(stats), 4)
        self.assertEqual([s.block_index for s in stats], [0, 2, 3, 5])
        for s in stats:
            for t in (s.q, s.k, s.v):
                self.assertLessEqual(t.min, t.mean)
                self.assertLessEqual(t.mean, t.max)
                self.assertGreaterEqual(t.std, 0.0)

    def test_zero_activations(self):
        zeros = np.zeros((1, 2, 3, 4))
        stats = collect_range_stats(ScriptedModel([(BlockKind.SPATIAL, 0.0, (zeros, zeros, zeros))]), ())
        self.assertEqual((stats[0].v.min, stats[0].v.max, stats[0].v.mean, stats[0].v.std), (0.0, 0.0, 0.0, 0.0))

    def test_scaled_values_scale_range(self):
        v = seeded_normal((1, 2, 8, 4), 3)
        q = k = np.ones_like(v)
        stats = collect_range_stats(ScriptedModel([
            (BlockKind.SPATIAL, 0.0, (q, k, 10.0 * v)),
            (BlockKind.TEMPORAL, 0.0, (q, k, v)),
        ]), ())
        self.assertAlmostEqual(stats[0].v.range, 10.0 * stats[1].v.range)
        self.assertEqual(stats[0].to_record()["kind"], "spatial")


if __name__ == "__main__":
    unittest.main()
