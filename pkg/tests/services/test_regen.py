"""
Unit tests for the Poisson covering construction of regenerative sets.

Statistical assertions use fixed seeds and at least four standard errors.
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
from scipy import stats

from regen_stable.core import complement_within, from_arrays, intersect_many, shift
from regen_stable.errors import InvalidInputError
from regen_stable.models import CoveringConfig, LocalTimeParams, build
from regen_stable.services.localtime import kingman_estimate
from regen_stable.services.regen import (
    coverage_probability,
    intersect_shifted,
    layer_survival_probability,
    refine_covering,
    sample_covering,
    sample_family,
    sample_shift,
    sample_shifts,
    sample_subordinator_range,
    shift_from_uniform,
    stationarity_profile,
)


class TestSampleCovering(unittest.TestCase):
    """Point process and uncovered set of one covering."""

    def setUp(self):
        self.cfg = CoveringConfig(beta=0.6, epsilon=0.05, horizon=1.0)

    def test_expected_point_count(self):
        rng = np.random.default_rng(11)
        counts = [sample_covering(self.cfg, rng).n_points for _ in range(4000)]
        expected = (1 - 0.6) * 1.0 / 0.05
        self.assertLess(abs(np.mean(counts) - expected), 4 * math.sqrt(expected / 4000))

    def test_lengths_and_uncovered_set(self):
        sample = sample_covering(self.cfg, np.random.default_rng(12))
        self.assertTrue(np.all(sample.z >= 0.05))
        covered = from_arrays(sample.y, sample.y + sample.z, 1.0)
        self.assertEqual(sample.uncovered, complement_within(covered))
        self.assertEqual(len(sample.points), sample.n_points)

    def test_nonpositive_epsilon_rejected(self):
        with self.assertRaises(InvalidInputError):
            build(CoveringConfig, beta=0.6, epsilon=0.0)

    def test_beta_near_one_leaves_window_uncovered(self):
        cfg = CoveringConfig(beta=1 - 1e-12, epsilon=0.05)
        sample = sample_covering(cfg, np.random.default_rng(13))
        self.assertEqual(sample.uncovered.intervals, [(0.0, 1.0)])

    def _frequency(self, points, epsilon, n, seed):
        cfg = CoveringConfig(beta=0.6, epsilon=epsilon)
        rng = np.random.default_rng(seed)
        hits = 0
        for _ in range(n):
            uncovered = sample_covering(cfg, rng).uncovered
            hits += all(uncovered.contains(x) for x in points)
        exact = coverage_probability(points, 0.6, epsilon)
        return hits / n, exact, math.sqrt(exact * (1 - exact) / n)

    def test_single_point_coverage_power_branch(self):
        freq, exact, se = self._frequency([0.5], 0.05, 20000, 14)
        self.assertAlmostEqual(exact, (math.e / 0.05) ** -0.4 * 0.5 ** -0.4, places=12)
        self.assertLess(abs(freq - exact), 4 * se)

    def test_single_point_coverage_exponential_branch(self):
        freq, exact, se = self._frequency([0.02], 0.05, 20000, 15)
        self.assertAlmostEqual(exact, math.exp(-0.4 * 0.02 / 0.05), places=12)
        self.assertLess(abs(freq - exact), 4 * se)

    def test_two_point_coverage(self):
        freq, exact, se = self._frequency([0.3, 0.6], 0.05, 20000, 16)
        self.assertLess(abs(freq - exact), 4 * se)

    def test_coverage_probability_rejects_bad_points(self):
        with self.assertRaises(InvalidInputError):
            coverage_probability([0.0], 0.6, 0.05)
        with self.assertRaises(InvalidInputError):
            coverage_probability([0.3, 0.3], 0.6, 0.05)


class TestRefinement(unittest.TestCase):

    def setUp(self):
        self.cfg = CoveringConfig(beta=0.6, epsilon=0.05)

    def test_same_epsilon_rejected(self):
        sample = sample_covering(self.cfg, np.random.default_rng(21))
        with self.assertRaises(InvalidInputError):
            refine_covering(sample, 0.05, np.random.default_rng(22))

    def test_refined_set_is_nested(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            sample = sample_covering(self.cfg, rng)
            refined = refine_covering(sample, 0.01, rng)
            self.assertEqual(intersect_many([refined.uncovered, sample.uncovered]), refined.uncovered)
            self.assertEqual(refined.config.epsilon, 0.01)
            self.assertTrue(np.all(refined.z >= 0.01))

    def test_expected_added_points(self):
        rng = np.random.default_rng(24)
        added = []
        for _ in range(2000):
            sample = sample_covering(self.cfg, rng)
            added.append(refine_covering(sample, 0.02, rng).n_points - sample.n_points)
        expected = 0.4 * (1 / 0.02 - 1 / 0.05)
        self.assertLess(abs(np.mean(added) - expected), 4 * math.sqrt(expected / 2000))

    def test_layer_survival(self):
        self.assertAlmostEqual(layer_survival_probability(0.75, 1e-3, 1e-2, p=2), 0.1 ** 0.5)
        with self.assertRaises(InvalidInputError):
            layer_survival_probability(0.75, 1e-2, 1e-3)


class TestShifts(unittest.TestCase):

    def test_inverse_cdf(self):
        self.assertAlmostEqual(shift_from_uniform(0.25, 0.5), 0.0625)
        self.assertEqual(shift_from_uniform(1.0, 0.5), 1.0)

    def test_shift_law(self):
        beta = 0.6
        draws = sample_shifts(beta, 100_000, np.random.default_rng(31))
        self.assertTrue(np.all((draws > 0) & (draws <= 1)))
        result = stats.kstest(draws, lambda v: np.clip(v, 0, 1) ** (1 - beta))
        self.assertGreater(result.pvalue, 1e-3)

    def test_bad_beta(self):
        with self.assertRaises(InvalidInputError):
            sample_shift(1.0, np.random.default_rng(32))


class TestShiftedFamily(unittest.TestCase):

    def test_single_member_is_its_shifted_set(self):
        fam = sample_family(0.75, 0.01, 1.0, [1], np.random.default_rng(41), shifts=[0.3])
        sample, v = fam.members[0]
        self.assertEqual(intersect_shifted(fam), shift(sample.uncovered, 0.3))

    def test_shifts_beyond_horizon_give_empty_set(self):
        fam = sample_family(0.75, 0.01, 1.0, [1, 2], np.random.default_rng(42), shifts=[1.0, 1.5])
        self.assertTrue(intersect_shifted(fam).is_empty())

    def test_restrict_to_and_members_are_independent(self):
        fam = sample_family(0.75, 0.01, 1.0, [1, 2, 3], np.random.default_rng(43))
        sub = fam.restrict_to([1, 3])
        self.assertEqual(sub.index_set, (1, 3))
        self.assertIs(sub.members[1], fam.members[2])
        self.assertNotEqual(fam.members[0][1], fam.members[1][1])
        with self.assertRaises(InvalidInputError):
            fam.restrict_to([4])

    def test_same_stream_same_family(self):
        a = sample_family(0.75, 0.01, 1.0, [1, 2], np.random.default_rng(44))
        b = sample_family(0.75, 0.01, 1.0, [1, 2], np.random.default_rng(44))
        self.assertEqual(intersect_shifted(a), intersect_shifted(b))

    def test_mismatched_horizons(self):
        a = sample_family(0.75, 0.01, 1.0, [1], np.random.default_rng(45))
        b = sample_family(0.75, 0.01, 2.0, [2], np.random.default_rng(46))
        mixed = type(a)((1, 2), (a.members[0], b.members[0]))
        with self.assertRaises(InvalidInputError):
            intersect_shifted(mixed)


class TestStationarityAndSubordinator(unittest.TestCase):

    def test_shifted_set_occupation_is_flat(self):
        mean, se = stationarity_profile(
            0.6, 1e-3, 0.2, [0.2, 0.5, 0.8], 4000, np.random.default_rng(51)
        )
        for j in range(1, 3):
            self.assertLess(abs(mean[j] - mean[0]), 4 * math.hypot(se[j], se[0]))

    def test_subordinator_range(self):
        r = sample_subordinator_range(0.6, 1.0, 2000, np.random.default_rng(52))
        self.assertTrue(r.points.contains(0.0))
        self.assertGreater(r.local_time, 0.0)
        self.assertLessEqual(r.points.hi.max(), 1.0)
        self.assertEqual(r.clock_step, 1 / 2000)

    def test_kingman_on_subordinator_range_matches_inverse(self):
        beta = 0.6
        params = LocalTimeParams(beta=beta, p=1)
        rng = np.random.default_rng(53)
        kingman, local = [], []
        for _ in range(200):
            r = sample_subordinator_range(beta, 1.0, 10_000, rng)
            kingman.append(kingman_estimate(r.points, 1.0, 1000, params))
            local.append(r.local_time)
        self.assertLess(abs(np.mean(kingman) / np.mean(local) - 1), 0.1)


if __name__ == '__main__':
    unittest.main()
