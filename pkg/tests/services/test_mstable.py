"""
Unit tests for Lévy-measure helpers and the truncated-series sampler of Z.
"""
import math
import unittest
import sys
from pathlib import Path

# Add project root to path when running as standalone script
if __name__ == '__main__':
    project_root = Path(__file__).parent.parent.parent
    sys.path.insert(0, str(project_root))

import numpy as np

from regen_stable.errors import InvalidInputError
from regen_stable.models import LevyModel, SeriesTruncation
from regen_stable.services import stats
from regen_stable.services.mstable import (
    c_alpha,
    c_alpha_quadrature,
    elementary_symmetric,
    hurst_exponent,
    levy_tail,
    poisson_arrivals,
    rademacher,
    rho_inverse,
    sample_Z_path,
    sample_Z_paths,
    truncation_diagnostic,
    truncation_tail,
    unsimulated_tail_bound,
)
from regen_stable.services.seeding import replication_rng, split


class TestLevyHelpers(unittest.TestCase):

    def test_c_alpha_at_one(self):
        self.assertAlmostEqual(c_alpha(1.0), 2 / math.pi, places=15)

    def test_c_alpha_matches_quadrature(self):
        for alpha in (0.3, 0.8, 1.5):
            with self.subTest(alpha=alpha):
                self.assertLess(abs(c_alpha_quadrature(alpha) / c_alpha(alpha) - 1), 1e-6)

    def test_c_alpha_range(self):
        with self.assertRaises(InvalidInputError):
            c_alpha(2.0)

    def test_rho_inverse_closed_form_matches_bisection(self):
        alpha = 0.8
        sas = LevyModel.sas(alpha)
        same = LevyModel.broken_power(alpha, alpha, scale=c_alpha(alpha) / 2)
        for y in (0.01, 1.0, 50.0):
            with self.subTest(y=y):
                self.assertAlmostEqual(rho_inverse(same, y) / rho_inverse(sas, y), 1.0, places=10)

    def test_rho_inverse_inverts_tail(self):
        model = LevyModel.broken_power(1.2, 0.5, scale=2.0)
        for y in (0.1, 3.0, 10.0):
            x = rho_inverse(model, y)
            self.assertAlmostEqual(levy_tail(model, x), y / 2, places=8)

    def test_rho_inverse_vectorized(self):
        values = rho_inverse(LevyModel.sas(1.5), np.array([1.0, 2.0]))
        self.assertEqual(values.shape, (2,))
        self.assertGreater(values[0], values[1])

    def test_rho_inverse_rejects_nonpositive(self):
        with self.assertRaises(InvalidInputError):
            rho_inverse(LevyModel.sas(1.5), 0.0)

    def test_custom_model_needs_tail(self):
        with self.assertRaises(ValueError):
            LevyModel(variant="custom", alpha=1.0, alpha0=1.0)

    def test_hurst(self):
        self.assertAlmostEqual(hurst_exponent(0.8, 0.75, 2), 1.125)
        self.assertAlmostEqual(hurst_exponent(1.0, 0.75, 2), 1.0)

    def test_elementary_symmetric(self):
        self.assertEqual(elementary_symmetric([1, 2, 3], 2), 11.0)
        self.assertEqual(elementary_symmetric([1, 2, 3], 3), 6.0)


class TestSampleZ(unittest.TestCase):

    def setUp(self):
        self.trunc = SeriesTruncation(m=4, n_arrivals=10)
        self.grid = np.linspace(0, 1, 6)

    def test_starts_at_zero(self):
        path = sample_Z_path(0.8, 0.75, 2, self.trunc, 1e-3, self.grid, np.random.default_rng(201))
        self.assertEqual(path.values[0], 0.0)
        self.assertEqual(path.params, (0.8, 0.75, 2))
        self.assertEqual(path.values.shape, self.grid.shape)

    def test_reproducible(self):
        a = sample_Z_path(0.8, 0.75, 2, self.trunc, 1e-3, self.grid, np.random.default_rng(202))
        b = sample_Z_path(0.8, 0.75, 2, self.trunc, 1e-3, self.grid, np.random.default_rng(202))
        np.testing.assert_array_equal(a.values, b.values)

    def test_global_sign_flip_is_invisible_for_even_p(self):
        ones = np.ones(self.trunc.n_arrivals)
        a = sample_Z_path(0.8, 0.75, 2, self.trunc, 1e-3, self.grid, np.random.default_rng(203), signs=ones)
        b = sample_Z_path(0.8, 0.75, 2, self.trunc, 1e-3, self.grid, np.random.default_rng(203), signs=-ones)
        np.testing.assert_allclose(a.values, b.values, rtol=1e-12, atol=0)

    def test_given_signs_leave_other_streams_alone(self):
        drawn = rademacher(self.trunc.n_arrivals, split(np.random.default_rng(206), 3)[0])
        a = sample_Z_path(0.8, 0.75, 2, self.trunc, 1e-3, self.grid, np.random.default_rng(206))
        b = sample_Z_path(0.8, 0.75, 2, self.trunc, 1e-3, self.grid, np.random.default_rng(206), signs=drawn)
        np.testing.assert_array_equal(a.values, b.values)

    def test_positive_signs_give_nondecreasing_path(self):
        ones = np.ones(self.trunc.n_arrivals)
        path = sample_Z_path(0.8, 0.75, 2, self.trunc, 1e-3, self.grid, np.random.default_rng(204), signs=ones)
        self.assertTrue(np.all(np.diff(path.values) >= 0))

    def test_invalid_inputs(self):
        rng = np.random.default_rng(205)
        with self.assertRaises(InvalidInputError):
            sample_Z_path(0.8, 0.4, 2, self.trunc, 1e-3, self.grid, rng)
        with self.assertRaises(InvalidInputError):
            sample_Z_path(0.8, 0.75, 5, self.trunc, 1e-3, self.grid, rng)
        with self.assertRaises(InvalidInputError):
            sample_Z_path(0.8, 0.75, 2, self.trunc, 1e-3, [0.5, 0.2], rng)
        with self.assertRaises(InvalidInputError):
            sample_Z_path(0.8, 0.75, 2, self.trunc, 1e-3, self.grid, rng, signs=np.ones(3))

    def test_paths_follow_replication_streams(self):
        paths = sample_Z_paths(0.8, 0.75, 2, self.trunc, 1e-3, self.grid, 3, master_seed=9, tag="unit")
        for k, path in enumerate(paths):
            expected = sample_Z_path(0.8, 0.75, 2, self.trunc, 1e-3, self.grid, replication_rng(9, "unit", k))
            np.testing.assert_array_equal(path.values, expected.values)


class TestTruncation(unittest.TestCase):

    def test_tail_shrinks_with_cutoff(self):
        arrivals = poisson_arrivals(200, np.random.default_rng(301))
        tails = [truncation_tail(0.8, 0.75, 2, arrivals, m) for m in (2, 5, 10, 50)]
        self.assertTrue(all(a >= b for a, b in zip(tails, tails[1:])))
        self.assertEqual(truncation_tail(0.8, 0.75, 2, arrivals, 200), 0.0)

    def test_full_series_has_no_tail(self):
        trunc = SeriesTruncation(m=20, n_arrivals=20)
        self.assertEqual(truncation_diagnostic(0.8, 0.75, 2, trunc, np.random.default_rng(302)), 0.0)

    def test_tail_decay_rate(self):
        rng = np.random.default_rng(303)
        ms = np.array([10, 20, 40, 80])
        slopes = []
        for _ in range(50):
            arrivals = poisson_arrivals(5000, rng)
            tails = [truncation_tail(0.8, 0.75, 2, arrivals, int(m)) for m in ms]
            slopes.append(stats.loglog_slope(ms, tails))
        self.assertLess(abs(np.median(slopes) - (1 - 2 / 0.8)), 0.3)

    def test_unsimulated_bound_decreases(self):
        bounds = [unsimulated_tail_bound(0.8, 2, n) for n in (10, 100, 1000)]
        self.assertTrue(bounds[0] > bounds[1] > bounds[2] > 0)


if __name__ == '__main__':
    unittest.main()
