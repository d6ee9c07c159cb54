"""
Command-line entry point for the regen-stable laboratory.

    python -m regen_stable <subcommand> [--config FILE] [--seed N] [--set key=value ...]
                                        [--out DIR] [--threads N] [--log-level LEVEL]

Diagnostics go to stderr; stdout carries one line of JSON. Exit codes: 0 success,
1 failed acceptance check, 2 usage or configuration error, 3 I/O error.
"""
import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional

from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.table import Table

from regen_stable import __version__
from regen_stable.config import settings
from regen_stable.errors import ConfigError, ExperimentFailure, InvalidInputError
from regen_stable.models import (
    CliInvocation,
    ExperimentKind,
    LevyModel,
    LocalTimeParams,
    RenewalChainModel,
    StatSummary,
    Subcommand,
    build,
)
from regen_stable.services import run_experiment
from regen_stable.services.configuration import (
    apply_flags,
    apply_overrides,
    embedded_defaults,
    load_config_file,
    resolve_experiment,
    resolve_model_info,
)
from regen_stable.services.ergodic import c_n_slope
from regen_stable.services.mstable import c_alpha, c_alpha_quadrature, hurst_exponent

logger = logging.getLogger("regen_stable")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", dest="config_path", help="TOML configuration file")
    common.add_argument("--seed", type=int, help="master seed (overrides the config file)")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override a configuration value (repeatable)")
    common.add_argument("--out", help="output root directory")
    common.add_argument("--threads", type=int, help="worker processes (default REGEN_STABLE_THREADS)")
    common.add_argument("--log-level", help="logging level (default REGEN_STABLE_LOG_LEVEL)")
    common.add_argument("--dry-run", action="store_true",
                        help="print the resolved configuration and exit")

    parser = argparse.ArgumentParser(
        prog="regen-stable",
        description="Simulation and verification of stable-regenerative multiple-stable processes",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")
    for subcommand in Subcommand:
        p = sub.add_parser(subcommand.value, parents=[common])
        if subcommand == Subcommand.INFO:
            p.add_argument("--kind", choices=[k.value for k in ExperimentKind],
                           help="only list the defaults of this experiment")
    return parser


def _document(invocation: CliInvocation) -> Dict[str, Any]:
    document = load_config_file(invocation.config_path or settings.CONFIG_PATH)
    document = apply_flags(document, invocation.seed, invocation.out, invocation.threads)
    kind = invocation.subcommand.kind
    return apply_overrides(document, kind, invocation.overrides)


def parse_and_validate(argv: Optional[List[str]] = None) -> CliInvocation:
    """Parse argv into a CliInvocation whose configuration has been validated.

    Raises:
        SystemExit: on argparse usage errors (code 2)
        ConfigError: on a missing config file or invalid fields (all listed)
    """
    args = build_parser().parse_args(argv)
    invocation = build(
        CliInvocation,
        subcommand=Subcommand(args.subcommand),
        config_path=args.config_path,
        overrides=args.overrides,
        seed=args.seed,
        out=args.out,
        threads=args.threads,
        log_level=args.log_level,
        kind=getattr(args, "kind", None),
        dry_run=args.dry_run,
    )
    document = _document(invocation)
    if invocation.subcommand.kind is None:
        resolve_model_info(document)
    else:
        resolve_experiment(document, invocation.subcommand.kind)
    return invocation


def configure_logging(level: Optional[str] = None) -> None:
    level = (level or settings.LOG_LEVEL).upper()
    root = logging.getLogger()
    for handler in list(root.handlers):
        if isinstance(handler, RichHandler):
            root.removeHandler(handler)
    root.addHandler(RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=True))
    root.setLevel(level)


def _emit(payload: Dict[str, Any]) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True, default=str) + "\n")
    sys.stdout.flush()


def _info(invocation: CliInvocation, document: Dict[str, Any]) -> int:
    model = resolve_model_info(document)
    params = build(LocalTimeParams, beta=model.beta, p=model.p)
    values = {
        "alpha": model.alpha,
        "beta": model.beta,
        "p": model.p,
        "beta_p": params.beta_p,
        "hurst": hurst_exponent(model.alpha, model.beta, model.p),
        "c_alpha": c_alpha(model.alpha),
        "c_alpha_quadrature": c_alpha_quadrature(model.alpha),
        "c_n_slope": c_n_slope(RenewalChainModel(beta=model.beta), LevyModel.sas(model.alpha), model.p),
    }
    defaults = embedded_defaults()
    if invocation.kind is not None:
        defaults = {invocation.kind.value: defaults[invocation.kind.value]}

    table = Table(title="Model parameters")
    table.add_column("quantity")
    table.add_column("value", justify="right")
    for name, value in values.items():
        table.add_row(name, f"{value:.10g}" if isinstance(value, float) else str(value))
    console = Console(stderr=True)
    console.print(table)
    for kind, block in defaults.items():
        console.print(f"[bold]{escape(f'[{kind}]')}[/bold]")
        console.print_json(json.dumps(block))
    _emit({"subcommand": Subcommand.INFO.value, **values, "defaults": defaults})
    return EXIT_OK


def _print_checks(summary: StatSummary) -> None:
    table = Table(title=f"{summary.kind.value} checks")
    table.add_column("check")
    table.add_column("statistic", justify="right")
    table.add_column("threshold", justify="right")
    table.add_column("passed")
    for check in summary.checks:
        table.add_row(escape(check.name), f"{check.statistic:.4g}", f"{check.threshold:.4g}",
                      "yes" if check.passed else "[red]no[/red]")
    Console(stderr=True).print(table)


def run(invocation: CliInvocation) -> int:
    """Dispatch a validated invocation; returns the exit code."""
    try:
        document = _document(invocation)
        if invocation.subcommand == Subcommand.INFO:
            return _info(invocation, document)
        cfg = resolve_experiment(document, invocation.subcommand.kind)
        if invocation.dry_run:
            _emit(cfg.resolved())
            return EXIT_OK
        summary = run_experiment(cfg)
        _print_checks(summary)
        _emit({
            "kind": cfg.kind.value,
            "passed": summary.passed,
            "failing": summary.failing,
            "mean": summary.mean,
            "std_error": summary.std_error,
            "n_samples": summary.n_samples,
            "output": f"{cfg.output_path}/{cfg.kind.value}",
        })
        if not summary.passed:
            raise ExperimentFailure(summary.failing)
        return EXIT_OK
    except ExperimentFailure as e:
        logger.error("%s", e)
        return EXIT_FAILED
    except (ConfigError, InvalidInputError) as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except OSError as e:  # OutputError included
        logger.error("%s", e)
        return EXIT_IO


def main(argv: Optional[List[str]] = None) -> int:
    try:
        invocation = parse_and_validate(argv)
    except SystemExit as e:
        return int(e.code or 0)
    except (ConfigError, InvalidInputError) as e:
        configure_logging()
        logger.error("%s", e)
        return EXIT_USAGE
    configure_logging(invocation.log_level)
    return run(invocation)


if __name__ == "__main__":
    sys.exit(main())
