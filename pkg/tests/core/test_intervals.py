"""
Unit tests for the interval-set algebra.
"""
import itertools
import json
import unittest
import sys
from pathlib import Path

# Add project root to path when running as standalone script
if __name__ == '__main__':
    project_root = Path(__file__).parent.parent.parent
    sys.path.insert(0, str(project_root))

import numpy as np

from regen_stable.core import (
    Interval,
    IntervalSet,
    canonicalize,
    complement_within,
    dilate,
    from_arrays,
    intersect_many,
    measure_upto,
    measure_upto_many,
    restrict,
    shift,
    union_many,
)
from regen_stable.errors import InvalidInputError


def random_set(rng, window=1.0, n=20):
    lo = rng.uniform(0, window, n)
    return from_arrays(lo, lo + rng.exponential(0.02, n), window)


class TestCanonicalize(unittest.TestCase):
    """Canonical form: sorted, merged, clipped."""

    def test_overlapping_intervals_merge(self):
        s = canonicalize([[0, 1], [0.5, 2]], 3)
        self.assertEqual(s.intervals, [(0.0, 2.0)])

    def test_empty_input(self):
        s = canonicalize([], 1)
        self.assertTrue(s.is_empty())
        self.assertEqual(s.total_measure(), 0.0)

    def test_clipping_to_window(self):
        self.assertEqual(canonicalize([[0, 0.5]], 0.3).intervals, [(0.0, 0.3)])

    def test_touching_intervals_merge(self):
        s = canonicalize([Interval(0.2, 0.4), Interval(0.4, 0.7)], 1)
        self.assertEqual(s.intervals, [(0.2, 0.7)])

    def test_unsorted_input_is_sorted(self):
        s = canonicalize([(0.6, 0.7), (0.1, 0.2)], 1)
        self.assertEqual(s.intervals, [(0.1, 0.2), (0.6, 0.7)])

    def test_negative_coordinates_rejected(self):
        with self.assertRaises(InvalidInputError):
            canonicalize([[-0.1, 0.2]], 1)

    def test_reversed_interval_rejected(self):
        with self.assertRaises(InvalidInputError):
            Interval(0.5, 0.2)
        with self.assertRaises(InvalidInputError):
            canonicalize([[0.5, 0.2]], 1)

    def test_nonpositive_window_rejected(self):
        with self.assertRaises(InvalidInputError):
            canonicalize([[0, 0.1]], 0)

    def test_degenerate_points_kept(self):
        s = canonicalize([(0.3, 0.3)], 1)
        self.assertEqual(s.n_intervals, 1)
        self.assertTrue(s.contains(0.3))
        self.assertEqual(s.total_measure(), 0.0)

    def test_json_round_trip(self):
        s = canonicalize([(0.1, 0.2), (0.5, 0.75)], 1)
        self.assertEqual(json.loads(s.to_json()), [[0.1, 0.2], [0.5, 0.75]])
        self.assertEqual(IntervalSet.from_json(s.to_json(), 1), s)


class TestComplement(unittest.TestCase):

    def test_interior_interval(self):
        s = canonicalize([[0.2, 0.5]], 1)
        self.assertEqual(complement_within(s).intervals, [(0.0, 0.2), (0.5, 1.0)])

    def test_empty_and_full(self):
        self.assertEqual(complement_within(IntervalSet.empty(1)).intervals, [(0.0, 1.0)])
        self.assertTrue(complement_within(IntervalSet.full(1)).is_empty())

    def test_points_leave_no_touching_gaps(self):
        point = canonicalize([(0.5, 0.5)], 1.0)
        self.assertEqual(complement_within(point, 1.0).intervals, [(0.0, 1.0)])
        mixed = canonicalize([(0.5, 0.5), (0.7, 0.8)], 1.0)
        c = complement_within(mixed)
        self.assertEqual(c.intervals, [(0.0, 0.7), (0.8, 1.0)])
        gaps = np.asarray(c.lo[1:]) - np.asarray(c.hi[:-1])
        self.assertTrue(np.all(gaps > 0))
        edge = canonicalize([(0.0, 0.0), (1.0, 1.0)], 1.0)
        self.assertEqual(complement_within(edge).intervals, [(0.0, 1.0)])

    def test_involution_up_to_null_sets(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            s = random_set(rng)
            twice = complement_within(complement_within(s))
            self.assertAlmostEqual(twice.total_measure(), s.total_measure(), places=12)
            difference = intersect_many([twice, complement_within(s)])
            self.assertAlmostEqual(difference.total_measure(), 0.0, places=12)

    def test_measures_add_up_to_t(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            s = random_set(rng)
            c = complement_within(s)
            for t in (0.0, 0.37, 0.81, 1.0):
                self.assertAlmostEqual(measure_upto(s, t) + measure_upto(c, t), t, places=12)


class TestIntersect(unittest.TestCase):

    def test_pair(self):
        a = canonicalize([[0, 1]], 2)
        b = canonicalize([[0.5, 2]], 2)
        self.assertEqual(intersect_many([a, b]).intervals, [(0.5, 1.0)])

    def test_with_empty(self):
        a = canonicalize([[0, 1]], 2)
        self.assertTrue(intersect_many([a, IntervalSet.empty(2)]).is_empty())

    def test_idempotent(self):
        s = random_set(np.random.default_rng(3))
        self.assertEqual(intersect_many([s, s]), s)

    def test_order_independent(self):
        rng = np.random.default_rng(4)
        sets = [random_set(rng, n=60) for _ in range(3)]
        results = [intersect_many(list(perm)) for perm in itertools.permutations(sets)]
        for result in results[1:]:
            self.assertEqual(result, results[0])

    def test_mismatched_windows(self):
        with self.assertRaises(InvalidInputError):
            intersect_many([IntervalSet.full(1), IntervalSet.full(2)])
        with self.assertRaises(InvalidInputError):
            intersect_many([])

    def test_touching_endpoints_give_a_point(self):
        a = canonicalize([[0, 0.5]], 1)
        b = canonicalize([[0.5, 1]], 1)
        self.assertEqual(intersect_many([a, b]).intervals, [(0.5, 0.5)])

    def test_union(self):
        a = canonicalize([[0, 0.2]], 1)
        b = canonicalize([[0.1, 0.4], [0.8, 0.9]], 1)
        self.assertEqual(union_many([a, b]).intervals, [(0.0, 0.4), (0.8, 0.9)])


class TestMeasureShiftDilate(unittest.TestCase):

    def test_measure_upto(self):
        s = canonicalize([[0, 0.3], [0.5, 0.6]], 1)
        self.assertAlmostEqual(measure_upto(s, 1), 0.4, places=15)
        self.assertAlmostEqual(measure_upto(s, 0.55), 0.35, places=15)
        self.assertEqual(measure_upto(s, 0), 0.0)

    def test_measure_outside_window(self):
        s = canonicalize([[0, 0.3]], 1)
        with self.assertRaises(InvalidInputError):
            measure_upto(s, 1.5)
        with self.assertRaises(InvalidInputError):
            measure_upto_many(s, [0.5, -0.1])

    def test_measure_monotone_and_lipschitz(self):
        s = random_set(np.random.default_rng(5), n=50)
        grid = np.linspace(0, 1, 501)
        values = measure_upto_many(s, grid)
        self.assertTrue(np.all(np.diff(values) >= 0))
        self.assertTrue(np.all(np.diff(values) <= np.diff(grid) + 1e-12))

    def test_vectorized_matches_scalar(self):
        s = random_set(np.random.default_rng(6), n=50)
        grid = np.linspace(0, 1, 37)
        expected = [measure_upto(s, t) for t in grid]
        np.testing.assert_allclose(measure_upto_many(s, grid), expected, atol=1e-14)

    def test_shift(self):
        s = shift(canonicalize([[0, 1]], 1), 0.5)
        self.assertEqual(s.intervals, [(0.5, 1.0)])
        self.assertTrue(shift(s, 2.0).is_empty())
        with self.assertRaises(InvalidInputError):
            shift(s, -0.1)

    def test_dilate_growth_bound(self):
        rng = np.random.default_rng(7)
        s = random_set(rng, n=30)
        for n in (10, 100, 1000):
            grown = dilate(s, 1.0 / n)
            self.assertGreaterEqual(grown.total_measure(), s.total_measure())
            self.assertLessEqual(grown.total_measure(), s.total_measure() + s.n_intervals / n + 1e-12)
            self.assertLessEqual(grown.hi.max(), 1.0)
            self.assertGreaterEqual(grown.lo.min(), 0.0)

    def test_dilate_merges_close_intervals(self):
        s = canonicalize([[0.2, 0.3], [0.35, 0.5]], 1)
        merged = dilate(s, 0.1)
        self.assertEqual(merged.n_intervals, 1)
        self.assertAlmostEqual(merged.lo[0], 0.15, places=14)
        self.assertAlmostEqual(merged.hi[0], 0.55, places=14)
        with self.assertRaises(InvalidInputError):
            dilate(s, -1)

    def test_restrict(self):
        s = canonicalize([[0.1, 0.3], [0.5, 0.9]], 1)
        self.assertEqual(restrict(s, 0.2, 0.6).intervals, [(0.2, 0.3), (0.5, 0.6)])
        self.assertTrue(restrict(s, 0.35, 0.45).is_empty())

    def test_contains_is_closed(self):
        s = canonicalize([[0.1, 0.3]], 1)
        self.assertTrue(s.contains(0.1))
        self.assertTrue(s.contains(0.3))
        self.assertFalse(s.contains(0.31))
        self.assertFalse(s.contains(0.05))


if __name__ == '__main__':
    unittest.main()
