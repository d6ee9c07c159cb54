"""
Unit tests for TOML configuration loading, overrides and validation.
"""
import tempfile
import unittest
import sys
from pathlib import Path

# Add project root to path when running as standalone script
if __name__ == '__main__':
    project_root = Path(__file__).parent.parent.parent
    sys.path.insert(0, str(project_root))

from regen_stable.config import settings
from regen_stable.errors import ConfigError
from regen_stable.models import DEFAULT_REPLICATIONS, CoveringCheckParams, ExperimentKind
from regen_stable.services.configuration import (
    apply_flags,
    apply_overrides,
    embedded_defaults,
    load_config_file,
    parse_override,
    resolve_experiment,
    resolve_model_info,
)


class TestLoadConfigFile(unittest.TestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.root = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def write(self, text):
        path = self.root / "experiment.toml"
        path.write_text(text)
        return str(path)

    def test_no_path_means_defaults(self):
        self.assertEqual(load_config_file(None), {})

    def test_missing_file(self):
        missing = str(self.root / "nope.toml")
        with self.assertRaises(ConfigError) as ctx:
            load_config_file(missing)
        self.assertIn(missing, str(ctx.exception))

    def test_tables(self):
        path = self.write('master_seed = 5\n[covering_check]\nbeta = 0.7\npoint_sets = [[0.5], [0.2, 0.4]]\n')
        document = load_config_file(path)
        self.assertEqual(document["master_seed"], 5)
        self.assertEqual(document["covering_check"]["point_sets"], [[0.5], [0.2, 0.4]])

    def test_unknown_table(self):
        with self.assertRaises(ConfigError) as ctx:
            load_config_file(self.write("[not_an_experiment]\nx = 1\n"))
        self.assertEqual(ctx.exception.fields, ["not_an_experiment: not a recognised table or key"])

    def test_invalid_toml(self):
        with self.assertRaises(ConfigError):
            load_config_file(self.write("beta = = 1\n"))


class TestOverrides(unittest.TestCase):

    def test_parse_literals(self):
        self.assertEqual(parse_override("beta=0.7"), (["beta"], 0.7))
        self.assertEqual(parse_override("point_sets=[[0.5]]"), (["point_sets"], [[0.5]]))
        self.assertEqual(parse_override("tolerances.z_max = 4"), (["tolerances", "z_max"], 4))
        self.assertEqual(parse_override("output_dir=results/x"), (["output_dir"], "results/x"))

    def test_malformed(self):
        with self.assertRaises(ConfigError):
            parse_override("beta")
        with self.assertRaises(ConfigError):
            parse_override("=3")

    def test_kind_table_and_top_level(self):
        document = {"covering_check": {"beta": 0.6}}
        result = apply_overrides(document, ExperimentKind.COVERING_CHECK, ["beta=0.7", "master_seed=9"])
        self.assertEqual(result["covering_check"]["beta"], 0.7)
        self.assertEqual(result["master_seed"], 9)
        self.assertEqual(document["covering_check"]["beta"], 0.6)

    def test_model_table_without_kind(self):
        result = apply_overrides({}, None, ["alpha=1.2"])
        self.assertEqual(result, {"model": {"alpha": 1.2}})

    def test_scalar_in_path(self):
        with self.assertRaises(ConfigError):
            apply_overrides({"covering_check": {"beta": 0.6}}, ExperimentKind.COVERING_CHECK, ["beta.x=1"])

    def test_precedence(self):
        document = apply_flags({"master_seed": 5, "threads": 2}, seed=7, out=None, threads=None)
        self.assertEqual(document["master_seed"], 7)
        self.assertEqual(document["threads"], 2)
        document = apply_overrides(document, ExperimentKind.COVERING_CHECK, ["master_seed=9"])
        self.assertEqual(resolve_experiment(document, ExperimentKind.COVERING_CHECK).master_seed, 9)


class TestResolve(unittest.TestCase):

    def test_defaults(self):
        cfg = resolve_experiment({}, ExperimentKind.COVERING_CHECK)
        self.assertIsInstance(cfg.params, CoveringCheckParams)
        self.assertEqual(cfg.replications, DEFAULT_REPLICATIONS[ExperimentKind.COVERING_CHECK])
        self.assertEqual(cfg.master_seed, settings.DEFAULT_SEED)
        self.assertEqual(cfg.threads, settings.THREADS)

    def test_replications_key(self):
        cfg = resolve_experiment({"simulate_z": {"replications": 7}}, ExperimentKind.SIMULATE_Z)
        self.assertEqual(cfg.replications, 7)

    def test_all_invalid_fields_listed(self):
        document = {"covering_check": {"beta": 1.5, "epsilon": -1.0}}
        with self.assertRaises(ConfigError) as ctx:
            resolve_experiment(document, ExperimentKind.COVERING_CHECK)
        locations = sorted(field.split(":")[0] for field in ctx.exception.fields)
        self.assertEqual(locations, ["covering_check.beta", "covering_check.epsilon"])

    def test_unknown_parameter(self):
        with self.assertRaises(ConfigError):
            resolve_experiment({"covering_check": {"gamma": 1}}, ExperimentKind.COVERING_CHECK)

    def test_bad_run_settings(self):
        with self.assertRaises(ConfigError):
            resolve_experiment({"threads": 0}, ExperimentKind.COVERING_CHECK)

    def test_infeasible_series_parameters(self):
        with self.assertRaises(ConfigError):
            resolve_experiment({"simulate_z": {"m": 20, "n_arrivals": 10}}, ExperimentKind.SIMULATE_Z)

    def test_model_info(self):
        self.assertEqual(resolve_model_info({"model": {"alpha": 1.2}}).alpha, 1.2)
        with self.assertRaises(ConfigError):
            resolve_model_info({"model": {"beta": 1.5}})

    def test_embedded_defaults_cover_every_kind(self):
        defaults = embedded_defaults()
        self.assertEqual(set(defaults), {kind.value for kind in ExperimentKind})
        self.assertEqual(defaults["covering_check"]["point_sets"], [[0.5]])


if __name__ == '__main__':
    unittest.main()
