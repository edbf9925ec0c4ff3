import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from scenegen.errors import DegenerateReferenceError, DimensionError, SingularFitError
from scenegen.numerics import Polynomial, matmul, polyfit, rel_l1, seeded_normal, softmax_rows


class TestMatmul(unittest.TestCase):

    def test_hand_checked_product(self):
        out = matmul([[1, 2], [3, 4]], [[5, 6], [7, 8]])
        assert_array_equal(out, [[19, 22], [43, 50]])

    def test_identity(self):
        m = seeded_normal((3, 3), 1)
        assert_array_equal(matmul(np.eye(3), m), m)

    def test_matches_triple_loop(self):
        a, b = seeded_normal((8, 8), 2), seeded_normal((8, 8), 3)
        naive = np.zeros((8, 8))
        for i in range(8):
            for j in range(8):
                naive[i, j] = sum(a[i, k] * b[k, j] for k in range(8))
        assert_allclose(matmul(a, b), naive, rtol=1e-12, atol=1e-12)

    def test_associativity(self):
        a, b, c = (seeded_normal((4, 4), s) for s in (4, 5, 6))
        assert_allclose(matmul(matmul(a, b), c), matmul(a, matmul(b, c)), rtol=1e-9, atol=1e-12)

    def test_shape_mismatch(self):
        with self.assertRaises(DimensionError):
            matmul(np.ones((2, 3)), np.ones((2, 3)))


class TestSoftmaxRows(unittest.TestCase):

    def test_uniform_row(self):
        assert_allclose(softmax_rows([[0.0, 0.0, 0.0]]), [[1 / 3, 1 / 3, 1 / 3]])

    def test_large_logits_do_not_overflow(self):
        out = softmax_rows([[1000.0, 0.0]])
        assert_allclose(out, [[1.0, 0.0]], atol=1e-12)

    def test_rows_sum_to_one(self):
        for scale in (1.0, 1e3, 1e-3):
            out = softmax_rows(seeded_normal((4, 6), 9) * scale)
            assert_allclose(out.sum(axis=1), np.ones(4), atol=1e-9)
            self.assertTrue(np.all(out >= 0))


class TestSeededNormal(unittest.TestCase):

    def test_reproducible(self):
        assert_array_equal(seeded_normal((4,), 7), seeded_normal((4,), 7))

    def test_seeds_differ(self):
        self.assertFalse(np.array_equal(seeded_normal((4,), 7), seeded_normal((4,), 8)))

    def test_sample_statistics(self):
        x = seeded_normal((100_000,), 11)
        self.assertLess(abs(x.mean()), 0.02)
        self.assertLess(abs(x.var() - 1.0), 0.05)

    def test_zero_extent(self):
        with self.assertRaises(DimensionError):
            seeded_normal((3, 0), 1)


class TestPolyfit(unittest.TestCase):

    def test_exact_line(self):
        poly = polyfit([0, 1, 2], [1, 3, 5], 1)
        assert_allclose(poly.coefficients, [1.0, 2.0], atol=1e-12)

    def test_constant(self):
        poly = polyfit([0.0, 0.5, 1.0, 2.0], [3.0] * 4, 2)
        self.assertAlmostEqual(poly.coefficients[0], 3.0, places=10)
        assert_allclose(poly.coefficients[1:], [0.0, 0.0], atol=1e-10)

    def test_recovers_quartic(self):
        true = Polynomial((0.3, -1.2, 2.5, 0.7, -0.4))
        xs = np.linspace(0.0, 1.0, 12)
        poly = polyfit(xs, true(xs), 4)
        assert_allclose(poly.coefficients, true.coefficients, atol=1e-6)
        self.assertLessEqual(poly.residual(xs, true(xs)), 1e-6)

    def test_not_worse_than_normal_equations(self):
        rng = np.random.default_rng(0)
        for degree in range(5):
            xs = np.sort(rng.uniform(0.0, 1.0, 10))
            ys = rng.normal(size=10)
            v = np.vander(xs, degree + 1, increasing=True)
            oracle = Polynomial(tuple(np.linalg.solve(v.T @ v, v.T @ ys)))
            fit = polyfit(xs, ys, degree)
            self.assertLessEqual(fit.residual(xs, ys), oracle.residual(xs, ys) + 1e-9)

    def test_identical_xs(self):
        with self.assertRaises(SingularFitError):
            polyfit([1.0, 1.0, 1.0], [0.0, 1.0, 2.0], 1)

    def test_too_few_samples(self):
        with self.assertRaises(SingularFitError):
            polyfit([0.0, 1.0], [0.0, 1.0], 2)


class TestRelL1(unittest.TestCase):

    def test_identical(self):
        a = seeded_normal((5, 5), 1)
        self.assertEqual(rel_l1(a, a), 0.0)

    def test_ones_vs_zeros(self):
        self.assertEqual(rel_l1(np.ones(4), np.zeros(4)), 1.0)

    def test_matches_oracle(self):
        a, b = seeded_normal((6, 7), 1), seeded_normal((6, 7), 2)
        expected = np.abs(a - b).sum() / np.abs(a).sum()
        self.assertAlmostEqual(rel_l1(a, b), expected, delta=1e-12)

    def test_zero_reference(self):
        with self.assertRaises(DegenerateReferenceError):
            rel_l1(np.zeros(3), np.ones(3))


if __name__ == "__main__":
    unittest.main()
