import math
import os
import tempfile
import unittest
from unittest.mock import patch

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from scenegen.caching import (
    Branch,
    BranchMode,
    CachePolicy,
    CacheState,
    CalibrationTrace,
    Decision,
    Grouping,
    Modulation,
    SweepRow,
    TraceEntry,
    cached_forward,
    calibrate,
    fit_all_groupings,
    fit_grouping,
    load_policy,
    modulated_input,
    replay_decisions,
    save_policy,
    select_threshold,
    should_reuse,
)
from scenegen.errors import CalibrationError, ConfigurationError, DimensionError, InvariantViolation
from scenegen.numerics import Polynomial, seeded_normal


class StubModel:
    """Identity modulation, a counting block stack and an identity head."""

    def __init__(self):
        self.block_calls = 0

    def timestep_embedding(self, t):
        return np.array([t])

    def modulated_tokens(self, z, emb):
        return z

    def run_blocks(self, hidden, emb, cond, step=None):
        self.block_calls += 1
        return 2.0 * hidden + 1.0

    def head(self, hidden, emb):
        return hidden.copy()


def policy(threshold, steps=10, mode=BranchMode.CONDITION_ONLY, rescale=None):
    return CachePolicy(branch_mode=mode, threshold=threshold, rescale=rescale or Polynomial.identity(),
                       total_steps=steps)


class TestModulation(unittest.TestCase):

    def test_zero_modulation_is_identity(self):
        x = seeded_normal((2, 3, 4), 1)
        assert_array_equal(modulated_input(x, np.zeros(5), Modulation.zeros(5, 4)), x)

    def test_embeddings_change_output(self):
        mod = Modulation(seeded_normal((5, 4), 1), seeded_normal((5, 4), 2))
        x = seeded_normal((3, 4), 3)
        a = modulated_input(x, seeded_normal((5,), 4), mod)
        b = modulated_input(x, seeded_normal((5,), 5), mod)
        self.assertFalse(np.array_equal(a, b))

    def test_channel_mismatch(self):
        with self.assertRaises(DimensionError):
            modulated_input(np.ones((2, 3)), np.zeros(5), Modulation.zeros(5, 4))
        with self.assertRaises(DimensionError):
            modulated_input(np.ones((2, 4)), np.zeros(6), Modulation.zeros(5, 4))


class TestCachePolicy(unittest.TestCase):

    def test_first_and_last_steps_forced(self):
        self.assertEqual(policy(0.1, steps=6).force_compute_steps, frozenset({0, 5}))

    def test_forced_steps_in_range(self):
        with self.assertRaises(ConfigurationError):
            CachePolicy(total_steps=4, force_compute_steps=frozenset({7}))

    def test_unknown_mode(self):
        with self.assertRaises(ConfigurationError) as ctx:
            CachePolicy(branch_mode="sometimes")
        self.assertEqual(ctx.exception.key, "branch_mode")

    def test_for_steps_moves_anchors(self):
        p = CachePolicy(total_steps=10, force_compute_steps=frozenset({4})).for_steps(6)
        self.assertEqual(p.force_compute_steps, frozenset({0, 4, 5}))

    def test_disabled_never_reuses(self):
        state = CacheState()
        p = CachePolicy.disabled(10)
        state[Branch.CONDITION].cached_residual = np.zeros(1)
        for step in range(10):
            self.assertIs(should_reuse(state, p, 0.0, step, Branch.CONDITION), Decision.COMPUTE)

    def test_save_and_load(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "policy.json")
            original = policy(0.2, rescale=Polynomial((0.1, 2.0, -0.5)))
            save_policy(original, path, fits={"all": {}})
            self.assertEqual(load_policy(path), original)


class TestShouldReuse(unittest.TestCase):

    def test_accumulator_hand_example(self):
        decisions = replay_decisions([None] + [0.04] * 9, policy(0.1))
        C, R = Decision.COMPUTE, Decision.REUSE
        self.assertEqual(decisions, [C, R, R, C, R, R, C, R, R, C])

    def test_zero_threshold_always_computes(self):
        decisions = replay_decisions([None] + [0.01] * 7, policy(0.0, steps=8))
        self.assertTrue(all(d is Decision.COMPUTE for d in decisions))

    def test_infinite_threshold_only_forced(self):
        p = CachePolicy(threshold=math.inf, total_steps=8, force_compute_steps=frozenset({3}))
        decisions = replay_decisions([None] + [0.5] * 7, p)
        computed = [s for s, d in enumerate(decisions) if d is Decision.COMPUTE]
        self.assertEqual(computed, [0, 3, 7])

    def test_negative_rescale_is_clamped(self):
        state = CacheState()
        state[Branch.CONDITION].cached_residual = np.zeros(1)
        p = policy(0.1, rescale=Polynomial((-1.0,)))
        self.assertIs(should_reuse(state, p, 0.5, 1, Branch.CONDITION), Decision.REUSE)
        self.assertEqual(state[Branch.CONDITION].accumulated_distance, 0.0)

    def test_ungoverned_branch_computes(self):
        state = CacheState()
        state[Branch.UNCONDITION].cached_residual = np.zeros(1)
        self.assertIs(should_reuse(state, policy(1.0), 0.0, 1, Branch.UNCONDITION), Decision.COMPUTE)

    def test_no_residual_computes(self):
        self.assertIs(should_reuse(CacheState(), policy(1.0), 0.0, 1, Branch.CONDITION), Decision.COMPUTE)

    def test_reuse_grows_with_threshold(self):
        rng = np.random.default_rng(3)
        distances = [None] + list(rng.uniform(0.0, 0.2, 29))
        reused = [
            sum(d is Decision.REUSE for d in replay_decisions(distances, policy(th, steps=30)))
            for th in (0.0, 0.05, 0.1, 0.2, 0.4, 0.8, math.inf)
        ]
        self.assertEqual(reused, sorted(reused))


class TestCachedForward(unittest.TestCase):

    def setUp(self):
        self.model = StubModel()
        self.state = CacheState()
        self.z = seeded_normal((3, 4), 1)

    def run_step(self, step, p, branch=Branch.CONDITION, z=None):
        return cached_forward(self.model, self.z if z is None else z, 0.5, None, self.state, p,
                              step=step, branch=branch)

    def test_reuse_with_constant_input(self):
        p = policy(0.5, steps=5)
        outputs = [self.run_step(step, p) for step in range(3)]
        self.assertEqual(self.model.block_calls, 1)
        assert_array_equal(outputs[1], outputs[2])
        assert_allclose(outputs[1], outputs[0])
        bstate = self.state[Branch.CONDITION]
        self.assertEqual((bstate.computed_steps, bstate.reused_steps), (1, 2))
        self.assertEqual(bstate.steps, 3)

    def test_reuse_tracks_input_through_residual(self):
        p = policy(10.0, steps=5)
        self.run_step(0, p)
        shifted = self.z + 0.01
        out = self.run_step(1, p, z=shifted)
        assert_allclose(out, shifted + (self.z + 1.0))

    def test_disabled_policy_matches_direct_evaluation(self):
        p = CachePolicy.disabled(4)
        for step in range(4):
            out = self.run_step(step, p)
            assert_array_equal(out, 2.0 * self.z + 1.0)
        self.assertEqual(self.model.block_calls, 4)
        self.assertIsNone(self.state[Branch.CONDITION].cached_residual)

    def test_ungoverned_branch_skips_distance(self):
        p = policy(0.5, steps=5)
        with patch("scenegen.caching.decisions.relative_distance") as distance:
            for step in range(3):
                self.run_step(step, p, branch=Branch.UNCONDITION)
        distance.assert_not_called()
        self.assertEqual(self.model.block_calls, 3)
        self.assertIsNone(self.state[Branch.UNCONDITION].last_modulated_input)

    def test_reuse_without_residual_is_an_invariant_violation(self):
        with patch("scenegen.caching.decisions.should_reuse", return_value=Decision.REUSE):
            with self.assertRaises(InvariantViolation):
                self.run_step(1, policy(0.5, steps=5))

    def test_listener_sees_every_evaluation(self):
        seen = []
        p = policy(0.5, steps=3)
        for step in range(3):
            cached_forward(self.model, self.z, 0.5, None, self.state, p, step=step, branch=Branch.CONDITION,
                           listener=lambda s, b, m, o: seen.append((s, b)))
        self.assertEqual(seen, [(0, Branch.CONDITION), (1, Branch.CONDITION), (2, Branch.CONDITION)])


def trace_from(pairs, branch=Branch.CONDITION, start=1):
    return [TraceEntry(start + i, branch, x, y) for i, (x, y) in enumerate(pairs)]


class TestCalibration(unittest.TestCase):

    def test_exact_linear(self):
        trace = CalibrationTrace(trace_from([(x, 2 * x) for x in (0.1, 0.2, 0.3, 0.5)]))
        assert_allclose(calibrate(trace, degree=1).coefficients, [0.0, 2.0], atol=1e-12)

    def test_quartic_recovery(self):
        true = Polynomial((0.01, 0.5, -2.0, 4.0, -3.0))
        xs = np.linspace(0.02, 0.4, 15)
        trace = CalibrationTrace(trace_from(list(zip(xs, true(xs)))))
        fit = fit_grouping(trace, 4, Grouping.CONDITION)
        assert_allclose(fit.polynomial.coefficients, true.coefficients, atol=1e-6)
        self.assertLessEqual(fit.residual, 1e-6)
        self.assertEqual(fit.pairs, 15)

    def test_all_groupings(self):
        cond = trace_from([(x, 2 * x) for x in (0.1, 0.2, 0.3)])
        uncond = trace_from([(x, x + 0.1) for x in (0.1, 0.2, 0.3)], Branch.UNCONDITION)
        fits = fit_all_groupings(CalibrationTrace(cond + uncond), degree=1)
        self.assertEqual(set(fits), set(Grouping))
        self.assertEqual(fits[Grouping.ALL].pairs, 6)
        self.assertLess(fits[Grouping.CONDITION].residual, fits[Grouping.ALL].residual)
        self.assertEqual(fits[Grouping.CONDITION].to_record()["grouping"], "condition")

    def test_condition_fit_ignores_uncondition_entries(self):
        cond = trace_from([(x, 3 * x + 0.1) for x in (0.1, 0.2, 0.3)])
        noise_a = trace_from([(x, 0.5) for x in (0.1, 0.4, 0.7)], Branch.UNCONDITION)
        noise_b = trace_from([(x, 9.0 * x * x) for x in (0.2, 0.3, 0.9)], Branch.UNCONDITION)
        a = calibrate(CalibrationTrace(cond + noise_a), degree=1, branch=Grouping.CONDITION)
        b = calibrate(CalibrationTrace(cond + noise_b), degree=1, branch=Grouping.CONDITION)
        self.assertEqual(a, b)

    def test_insufficient_pairs(self):
        trace = CalibrationTrace(trace_from([(0.1, 0.2), (0.2, 0.3)]))
        with self.assertRaises(CalibrationError) as ctx:
            calibrate(trace, degree=4)
        self.assertIn("sampling steps", str(ctx.exception))

    def test_negative_distance(self):
        with self.assertRaises(CalibrationError):
            TraceEntry(1, Branch.CONDITION, -0.1, 0.2)

    def test_records_round_trip(self):
        trace = CalibrationTrace(trace_from([(0.1, 0.2), (0.3, 0.1)]) + trace_from([(0.2, 0.2)], Branch.UNCONDITION))
        restored = CalibrationTrace.from_records(trace.to_records())
        self.assertEqual(restored.entries, trace.entries)
        self.assertEqual(restored.input_distances(Branch.CONDITION), [None, 0.1, 0.3])

    def test_select_threshold(self):
        rows = [
            SweepRow(0.05, computed_steps=18, reused_steps=2, drift=0.001, seconds=1.0),
            SweepRow(0.1, computed_steps=10, reused_steps=10, drift=0.02, seconds=0.6),
            SweepRow(0.2, computed_steps=5, reused_steps=15, drift=0.09, seconds=0.4),
        ]
        self.assertEqual(select_threshold(rows, max_drift=0.05).threshold, 0.1)
        self.assertEqual(rows[1].reuse_fraction, 0.5)
        with self.assertRaises(CalibrationError):
            select_threshold(rows, max_drift=0.05, min_reuse=0.6)

    def test_select_threshold_prefers_larger_threshold_on_reuse_plateau(self):
        rows = [
            SweepRow(0.12, computed_steps=10, reused_steps=10, drift=0.03, seconds=0.6),
            SweepRow(0.1, computed_steps=10, reused_steps=10, drift=0.02, seconds=0.6),
            SweepRow(0.3, computed_steps=4, reused_steps=16, drift=0.2, seconds=0.3),
        ]
        self.assertEqual(select_threshold(rows, max_drift=0.05).threshold, 0.12)


if __name__ == "__main__":
    unittest.main()
