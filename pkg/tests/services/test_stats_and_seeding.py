"""
Unit tests for the statistics helpers and random-stream management.
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
from regen_stable.services import stats
from regen_stable.services.seeding import map_replications, replication_rng, split, tag_hash


def draw_normal(rng):
    return float(rng.standard_normal())


class TestStats(unittest.TestCase):

    def test_mean_and_se(self):
        mean, se = stats.mean_and_se([1.0, 2.0, 3.0])
        self.assertEqual(mean, 2.0)
        self.assertAlmostEqual(se, 1 / math.sqrt(3))
        self.assertEqual(stats.mean_and_se([4.0]), (4.0, 0.0))
        with self.assertRaises(InvalidInputError):
            stats.mean_and_se([])

    def test_combined_z(self):
        self.assertAlmostEqual(stats.combined_z(1.0, 0.3, 0.5, 0.4), 1.0)
        self.assertEqual(stats.combined_z(1.0, 0.0, 1.0, 0.0), 0.0)
        self.assertEqual(stats.combined_z(1.0, 0.0, 2.0, 0.0), math.inf)

    def test_rel_error_against_zero(self):
        self.assertAlmostEqual(stats.rel_error(1.1, 1.0), 0.1)
        self.assertEqual(stats.rel_error(0.0, 0.0), 0.0)
        self.assertEqual(stats.rel_error(0.5, 0.0), math.inf)

    def test_quantile_pairs_sorted(self):
        pairs = stats.quantile_pairs(np.arange(101), levels=(0.9, 0.1, 0.5))
        self.assertEqual([q for q, _ in pairs], [0.1, 0.5, 0.9])
        self.assertEqual(pairs[1][1], 50.0)

    def test_loglog_slope(self):
        x = np.array([1.0, 10.0, 100.0])
        self.assertAlmostEqual(stats.loglog_slope(x, 3 * x ** -0.5), -0.5, places=12)

    def test_nonincreasing(self):
        self.assertTrue(stats.nonincreasing([3.0, 2.0, 1.0], [0.1] * 3, 3.0))
        self.assertTrue(stats.nonincreasing([3.0, 3.1, 1.0], [0.1] * 3, 3.0))
        self.assertFalse(stats.nonincreasing([3.0, 4.0, 1.0], [0.1] * 3, 3.0))
        self.assertFalse(stats.nonincreasing([3.0, 3.1, 3.2], [0.1] * 3, 3.0))

    def test_check(self):
        self.assertTrue(stats.check("a", -0.5, 1.0).passed)
        self.assertFalse(stats.check("a", 1.5, 1.0).passed)
        self.assertTrue(stats.check("a", 1.5, 1.0, passed=True).passed)

    def test_ks_identical_samples(self):
        a = np.random.default_rng(1).normal(size=500)
        ks, pvalue = stats.ks_two_sample(a, a)
        self.assertEqual(ks, 0.0)
        self.assertEqual(pvalue, 1.0)

    def test_bootstrap_ks(self):
        rng = np.random.default_rng(2)
        a, b = rng.normal(size=300), rng.normal(size=300)
        ks, se = stats.bootstrap_ks(a, b, 50, np.random.default_rng(3))
        self.assertGreater(se, 0.0)
        self.assertEqual((ks, se), stats.bootstrap_ks(a, b, 50, np.random.default_rng(3)))

    def test_quantile_asymmetry_of_symmetric_sample(self):
        x = np.concatenate([np.arange(1, 101), -np.arange(1, 101)]).astype(float)
        total, scale = stats.quantile_asymmetry(x, 0.1)
        self.assertAlmostEqual(total, 0.0, places=12)
        self.assertGreater(scale, 0.0)


class TestSeeding(unittest.TestCase):

    def test_tag_hash_is_stable(self):
        self.assertEqual(tag_hash("covering_check"), tag_hash("covering_check"))
        self.assertNotEqual(tag_hash("covering_check"), tag_hash("simulate_z"))

    def test_replication_streams(self):
        a = replication_rng(7, "unit", 3).random(4)
        b = replication_rng(7, "unit", 3).random(4)
        c = replication_rng(7, "unit", 4).random(4)
        d = replication_rng(7, "other", 3).random(4)
        np.testing.assert_array_equal(a, b)
        self.assertFalse(np.array_equal(a, c))
        self.assertFalse(np.array_equal(a, d))

    def test_split_children_differ(self):
        children = split(np.random.default_rng(5), 3)
        draws = [child.random() for child in children]
        self.assertEqual(len(set(draws)), 3)

    def test_results_do_not_depend_on_worker_count(self):
        serial = map_replications(draw_normal, 13, 11, "unit")
        parallel = map_replications(draw_normal, 13, 11, "unit", threads=2)
        self.assertEqual(serial, parallel)
        self.assertEqual(serial[5], draw_normal(replication_rng(11, "unit", 5)))


if __name__ == '__main__':
    unittest.main()
