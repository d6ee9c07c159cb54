"""
Config-driven experiment runners.

Each runner takes a resolved ExperimentConfig, draws replication k from the stream
(master_seed, "<kind>[:<part>]", k), writes its CSV files under <output_path>/<kind>/ and
returns a StatSummary whose checks are judged against the configured tolerances.
"""
import functools
import logging
import math
from typing import Callable, Dict, List

import numba
import numpy as np
import pandas as pd
import scipy
from scipy.special import gamma

from regen_stable import __version__
from regen_stable.core import ZPathSample
from regen_stable.errors import InvalidInputError
from regen_stable.models import (
    CltCompareParams,
    CoveringCheckParams,
    CoveringConfig,
    ExperimentConfig,
    ExperimentKind,
    FlowConvergenceParams,
    IntegrationBudget,
    JointMomentsParams,
    LevyModel,
    LocalTimeMomentsParams,
    LocalTimeParams,
    MomentEstimate,
    MomentMethod,
    MomentSpec,
    RenewalChainModel,
    SelfSimParams,
    SimulateZParams,
    StatSummary,
    build,
    z_score,
)
from regen_stable.output import output_dir, write_csv, write_json, write_summary
from regen_stable.services import stats
from regen_stable.services.ergodic import (
    b_n,
    c_n_slope,
    flow_local_time,
    flow_moment_limit,
    mu_product,
    renewal_sequence,
    sample_mu_n_batch,
    sample_partial_sums,
)
from regen_stable.services.localtime import (
    kingman_ladder,
    local_time_eps,
    mittag_leffler_moment,
    sample_mittag_leffler,
)
from regen_stable.services.moments import closed_increment_moment, joint_moment, psi_shift_average
from regen_stable.services.mstable import (
    c_alpha,
    c_alpha_quadrature,
    hurst_exponent,
    sample_Z_paths,
    truncation_diagnostic,
    unsimulated_tail_bound,
)
from regen_stable.services.regen import (
    ShiftedFamily,
    coverage_probability,
    intersect_shifted,
    refine_covering,
    sample_covering,
    sample_family,
)
from regen_stable.services.seeding import map_replications, replication_rng, split

logger = logging.getLogger(__name__)

Runner = Callable[[ExperimentConfig], StatSummary]


def _versions() -> Dict[str, str]:
    return {
        "regen_stable": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
        "pandas": pd.__version__,
    }


def _warn(warnings: List[str], message: str) -> None:
    logger.warning(message)
    warnings.append(message)


def _derived_seed(cfg: ExperimentConfig, part: str) -> int:
    return int(replication_rng(cfg.master_seed, f"{cfg.kind.value}:{part}", 0).integers(2**63))


def _summary(cfg: ExperimentConfig, samples, **fields) -> StatSummary:
    samples = np.asarray(samples, dtype=float)
    mean, se = stats.mean_and_se(samples)
    fields.setdefault("knobs", {})
    fields["knobs"] = {**cfg.params.model_dump(mode="json"), **fields["knobs"]}
    return StatSummary(
        kind=cfg.kind,
        mean=mean,
        std_error=se,
        quantiles=stats.quantile_pairs(samples),
        n_samples=int(samples.size),
        versions=_versions(),
        **fields,
    )


# covering_check


def _covering_job(cfg: CoveringConfig, point_sets, rng: np.random.Generator) -> List[bool]:
    uncovered = sample_covering(cfg, rng).uncovered
    return [all(uncovered.contains(x) for x in points) for points in point_sets]


def run_covering_check(cfg: ExperimentConfig) -> StatSummary:
    """Monte Carlo frequency of {all points uncovered} against the closed form."""
    params: CoveringCheckParams = cfg.params
    cover = build(CoveringConfig, beta=params.beta, epsilon=params.epsilon, horizon=params.horizon)
    if any(x > params.horizon for points in params.point_sets for x in points):
        raise InvalidInputError("covering points must lie inside the horizon")
    job = functools.partial(_covering_job, cover, params.point_sets)
    hits = np.array(map_replications(job, cfg.replications, cfg.master_seed, cfg.kind.value, cfg.threads))

    n = cfg.replications
    rows, checks, warnings = [], [], []
    for k, points in enumerate(params.point_sets):
        freq = float(hits[:, k].mean())
        exact = coverage_probability(points, params.beta, params.epsilon)
        se = stats.binomial_se(exact, n)
        z = (freq - exact) / se if se > 0 else 0.0
        label = ";".join(f"{x:g}" for x in points)
        rows.append({
            "x": label, "q": len(points), "beta": params.beta, "epsilon": params.epsilon,
            "n": n, "freq": freq, "closed_form": exact, "z": z,
        })
        checks.append(stats.check(f"coverage[{label}]", z, params.tolerances.z_max))
        if n * exact < 50:
            _warn(warnings, f"coverage[{label}]: only {n * exact:.1f} expected hits in {n} replications")
    write_csv(rows, output_dir(cfg.output_path, cfg.kind.value) / "covering_check.csv",
              columns=["x", "q", "beta", "epsilon", "n", "freq", "closed_form", "z"])
    return _summary(cfg, hits[:, 0].astype(float), checks=checks, warnings=warnings)


# localtime_moments


def _localtime_job(params: LocalTimeMomentsParams, rng: np.random.Generator) -> np.ndarray:
    lt = LocalTimeParams(beta=params.beta, p=params.p)
    fam = sample_family(params.beta, params.epsilon, 1.0, range(1, params.p + 1), rng)
    inter = intersect_shifted(fam)
    row = [local_time_eps(inter, 0.0, params.t, params.epsilon, lt)]
    row += [local_time_eps(inter, s, t, params.epsilon, lt) for s, t in params.increments]
    row += list(kingman_ladder(inter, params.t, lt, params.kingman_ladder).values())
    return np.array(row)


def _refinement_values(params: LocalTimeMomentsParams, master_seed: int):
    """ε-level local time of one nonempty p-fold intersection and its values after independent
    refinements to η, all with the shifts held fixed.

    Returns (base, values, skipped); base and values are None when none of the
    `refine_attempts` seeds gives a nonempty intersection.
    """
    lt = LocalTimeParams(beta=params.beta, p=params.p)
    for skipped in range(params.refine_attempts):
        rng = replication_rng(master_seed, "localtime_moments:refine", skipped)
        fam = sample_family(params.beta, params.refine_epsilon, 1.0, range(1, params.p + 1), rng)
        base = local_time_eps(intersect_shifted(fam), 0.0, params.t, params.refine_epsilon, lt)
        if base > 0:
            break
    else:
        return None, None, params.refine_attempts
    values = np.empty(params.refinements)
    for j, child in enumerate(split(rng, params.refinements)):
        members = tuple(
            (refine_covering(sample, params.refine_eta, stream), v)
            for (sample, v), stream in zip(fam.members, split(child, params.p))
        )
        refined = ShiftedFamily(fam.index_set, members)
        values[j] = local_time_eps(intersect_shifted(refined), 0.0, params.t, params.refine_eta, lt)
    return base, values, skipped


def _ml_job(beta: float, rng: np.random.Generator) -> float:
    return sample_mittag_leffler(beta, 1.0, None, rng, grid=[0.0, 1.0]).values[-1]


def run_localtime_moments(cfg: ExperimentConfig) -> StatSummary:
    """First and second moments of the ε-estimator, increment stationarity, Kingman
    cross-check, martingale refinement and the Mittag–Leffler normalization.
    """
    params: LocalTimeMomentsParams = cfg.params
    tol = params.tolerances
    build(LocalTimeParams, beta=params.beta, p=params.p)
    job = functools.partial(_localtime_job, params)
    table = np.vstack(map_replications(job, cfg.replications, cfg.master_seed, cfg.kind.value, cfg.threads))
    ladder = sorted(params.kingman_ladder)
    local = table[:, 0]
    rows, checks, warnings = [], [], []

    def row(spec_id, method, value, se):
        rows.append({"spec_id": spec_id, "method": method, "value": value, "std_error": se})

    for r, rel_tol in ((1, tol.first_moment_rel), (2, tol.second_moment_rel)):
        mean, se = stats.mean_and_se(local**r)
        exact = closed_increment_moment(params.beta, params.p, r, 0.0, params.t)
        row(f"r={r}", MomentMethod.MONTE_CARLO.value, mean, se)
        row(f"r={r}", MomentMethod.CLOSED_FORM.value, exact, 0.0)
        checks.append(stats.check(f"moment_r{r}", stats.rel_error(mean, exact), rel_tol))
        if se > rel_tol * exact / 3:
            _warn(warnings, f"moment_r{r}: standard error {se:.3g} is large against tolerance {rel_tol}")

    for k, (s, t) in enumerate(params.increments):
        for r in (1, 2):
            mean, se = stats.mean_and_se(table[:, 1 + k] ** r)
            exact = closed_increment_moment(params.beta, params.p, r, s, t)
            name = f"increment[{s:g},{t:g}],r={r}"
            row(name, MomentMethod.MONTE_CARLO.value, mean, se)
            checks.append(stats.check(name, stats.combined_z(mean, se, exact, 0.0), tol.stationary_z))

    kingman = {}
    for k, n in enumerate(ladder):
        mean, se = stats.mean_and_se(table[:, 1 + len(params.increments) + k])
        kingman[n] = mean
        row(f"kingman[n={n}]", "kingman", mean, se)
    checks.append(stats.check(
        "kingman_cross_check", stats.rel_error(kingman[params.kingman_n], float(local.mean())), tol.kingman_rel,
    ))

    base, refined, skipped = _refinement_values(params, cfg.master_seed)
    if base is None:
        detail = f"no nonempty intersection at refine_epsilon in {skipped} seeds"
        _warn(warnings, f"martingale refinement: {detail}")
        checks.append(stats.check("martingale_refinement", math.inf, tol.refinement_se,
                                  passed=False, detail=detail))
    else:
        mean, se = stats.mean_and_se(refined)
        row(f"refinement[eps={params.refine_epsilon:g}]", "fixed_covering", base, 0.0)
        row(f"refinement[eta={params.refine_eta:g}]", MomentMethod.MONTE_CARLO.value, mean, se)
        checks.append(stats.check(
            "martingale_refinement", stats.combined_z(mean, se, base, 0.0), tol.refinement_se,
            detail=f"{skipped} seeds skipped before a nonempty intersection",
        ))

    for beta in params.ml_betas:
        ml = map_replications(functools.partial(_ml_job, beta), params.ml_paths, cfg.master_seed,
                              f"{cfg.kind.value}:ml:{beta:g}", cfg.threads)
        mean, se = stats.mean_and_se(ml)
        exact = mittag_leffler_moment(beta, 1)
        row(f"mittag_leffler[beta={beta:g}]", MomentMethod.MONTE_CARLO.value, mean, se)
        row(f"mittag_leffler[beta={beta:g}]", MomentMethod.CLOSED_FORM.value, exact, 0.0)
        checks.append(stats.check(f"mittag_leffler[beta={beta:g}]", stats.rel_error(mean, exact), tol.mittag_leffler_rel))

    directory = output_dir(cfg.output_path, cfg.kind.value)
    write_csv(rows, directory / "moments.csv", columns=["spec_id", "method", "value", "std_error"])
    columns = ["L"] + [f"L[{s:g},{t:g}]" for s, t in params.increments] + [f"kingman[n={n}]" for n in ladder]
    samples = pd.DataFrame(table, columns=columns)
    samples.insert(0, "replication", np.arange(cfg.replications))
    write_csv(samples, directory / "samples.csv")
    return _summary(cfg, local, checks=checks, warnings=warnings)


# joint_moments


def _joint_job(spec: MomentSpec, epsilon: float, rng: np.random.Generator) -> float:
    lt = LocalTimeParams(beta=spec.beta, p=spec.p)
    fam = sample_family(spec.beta, epsilon, 1.0, range(1, spec.K + 1), rng)
    value = 1.0
    for index_set, t in zip(spec.index_sets, spec.times):
        value *= local_time_eps(intersect_shifted(fam.restrict_to(index_set)), 0.0, t, epsilon, lt)
    return value


def run_joint_moments(cfg: ExperimentConfig) -> StatSummary:
    """Monte Carlo, quadrature and (for equal index sets) closed form of E ∏ L_{I_ℓ,t_ℓ},
    plus the shift-averaged Ψ.
    """
    params: JointMomentsParams = cfg.params
    tol = params.tolerances
    spec = build(
        MomentSpec, beta=params.beta, p=params.p,
        index_sets=[tuple(s) for s in params.index_sets], times=params.times,
    )
    spec_id = spec.to_json()
    checks, warnings = [], []

    budget = IntegrationBudget(
        evaluations=params.evaluations, rel_target=params.rel_target,
        seed=_derived_seed(cfg, "quadrature"), workers=cfg.threads,
    )
    quadrature = joint_moment(spec, budget, allow_closed_form=False)
    if quadrature.partial:
        _warn(warnings, f"quadrature stopped at relative SE {quadrature.relative_error:.3g}")

    job = functools.partial(_joint_job, spec, params.epsilon)
    samples = np.array(map_replications(job, cfg.replications, cfg.master_seed, cfg.kind.value, cfg.threads))
    mean, se = stats.mean_and_se(samples)
    monte_carlo = MomentEstimate(value=mean, std_error=se, method=MomentMethod.MONTE_CARLO)

    estimates = [monte_carlo, quadrature]
    checks.append(stats.check("mc_vs_quadrature", z_score(monte_carlo, quadrature), tol.z_max))
    checks.append(stats.check("quadrature_rel_se", quadrature.relative_error, tol.quadrature_rel_se))
    if len(set(spec.index_sets)) == 1 and len(set(spec.times)) == 1:
        closed = joint_moment(spec)
        estimates.append(closed)
        checks.append(stats.check("mc_vs_closed_form", z_score(monte_carlo, closed), tol.z_max))

    # per-shift precision is not targeted; the outer average carries the error
    psi_budget = IntegrationBudget(evaluations=params.psi_evaluations, rel_target=1.0)
    psi = psi_shift_average(spec, params.psi_shifts, psi_budget,
                            replication_rng(cfg.master_seed, f"{cfg.kind.value}:psi", 0))
    checks.append(stats.check("psi_consistency", z_score(psi, quadrature), tol.psi_z_max))

    rows = [
        {"spec_id": spec_id, "method": e.method.value, "value": e.value, "std_error": e.std_error}
        for e in estimates
    ]
    rows.append({"spec_id": spec_id, "method": "psi_shift_average", "value": psi.value, "std_error": psi.std_error})
    write_csv(rows, output_dir(cfg.output_path, cfg.kind.value) / "moments.csv",
              columns=["spec_id", "method", "value", "std_error"])
    return _summary(
        cfg, samples, checks=checks, warnings=warnings,
        knobs={"quadrature_evaluations": quadrature.n_evaluations, "psi_evaluations": psi.n_evaluations},
    )


# simulate_z / z_selfsim


def _paths(cfg: ExperimentConfig, grid) -> List[ZPathSample]:
    params = cfg.params
    return sample_Z_paths(
        params.alpha, params.beta, params.p, params.truncation, params.epsilon, grid,
        cfg.replications, cfg.master_seed, cfg.threads, tag=cfg.kind.value,
    )


def _series_knobs(cfg: ExperimentConfig) -> Dict[str, float]:
    params = cfg.params
    diagnostic = truncation_diagnostic(
        params.alpha, params.beta, params.p, params.truncation,
        replication_rng(cfg.master_seed, f"{cfg.kind.value}:diagnostic", 0),
    )
    return {
        "hurst": hurst_exponent(params.alpha, params.beta, params.p),
        "c_alpha": c_alpha(params.alpha),
        "truncation_diagnostic": diagnostic,
        "unsimulated_tail_bound": unsimulated_tail_bound(params.alpha, params.p, params.n_arrivals),
    }


def run_simulate_z(cfg: ExperimentConfig) -> StatSummary:
    """Truncated-series paths of Z on a uniform grid of [0, 1]."""
    params: SimulateZParams = cfg.params
    grid = np.linspace(0.0, 1.0, params.grid_points)
    paths = _paths(cfg, grid)
    values = np.vstack([path.values for path in paths])
    knobs = _series_knobs(cfg)
    warnings: List[str] = []
    for q in (0.1, 0.25):
        asymmetry, scale = stats.quantile_asymmetry(values[:, -1], q)
        if abs(asymmetry) > 4 * scale:
            _warn(warnings, f"Z(1) quantiles at {q} and {1 - q} are not symmetric ({asymmetry:.3g})")
    checks = [stats.check("z_at_zero", float(np.abs(values[:, 0]).max()), params.tolerances.z0_abs)]

    directory = output_dir(cfg.output_path, cfg.kind.value)
    frame = pd.DataFrame({
        "replication": np.repeat(np.arange(cfg.replications), grid.size),
        "t": np.tile(grid, cfg.replications),
        "Z": values.ravel(),
    })
    write_csv(frame, directory / "paths.csv")
    write_json(
        {
            "params": params.model_dump(mode="json"),
            "truncation": params.truncation.model_dump(mode="json"),
            "seed": cfg.master_seed,
            "replications": cfg.replications,
            **knobs,
        },
        directory / "metadata.json",
    )
    return _summary(cfg, values[:, -1], checks=checks, warnings=warnings, knobs=knobs)


def run_z_selfsim(cfg: ExperimentConfig) -> StatSummary:
    """KS comparison of Z(c t0)/c^H with Z(t0), plus the dual evaluation of C_α."""
    params: SelfSimParams = cfg.params
    tol = params.tolerances
    hurst = hurst_exponent(params.alpha, params.beta, params.p)
    grid = np.unique([params.t0, params.c * params.t0])
    paths = _paths(cfg, grid)
    base = np.array([path.at(params.t0) for path in paths])
    scaled = np.array([path.at(params.c * params.t0) for path in paths]) / params.c**hurst
    ks, pvalue = stats.ks_two_sample(scaled, base)
    warnings: List[str] = []
    if cfg.replications < tol.min_paths:
        _warn(warnings, f"only {cfg.replications} paths; the KS test is underpowered below {tol.min_paths}")
    checks = [stats.check("selfsim_ks", pvalue, tol.ks_level, passed=pvalue >= tol.ks_level)]
    for alpha in params.c_alpha_checks:
        checks.append(stats.check(
            f"c_alpha[{alpha:g}]", stats.rel_error(c_alpha_quadrature(alpha), c_alpha(alpha)), tol.c_alpha_rel,
        ))

    directory = output_dir(cfg.output_path, cfg.kind.value)
    write_csv([{"c": params.c, "t0": params.t0, "H": hurst, "ks": ks, "pvalue": pvalue, "n": cfg.replications}],
              directory / "selfsim.csv", columns=["c", "t0", "H", "ks", "pvalue", "n"])
    write_csv(pd.DataFrame({"replication": np.arange(cfg.replications), "Z_t0": base, "Z_ct0_scaled": scaled}),
              directory / "samples.csv")
    return _summary(cfg, base, checks=checks, warnings=warnings, ks_statistic=ks,
                    knobs={"hurst": hurst, **_series_knobs(cfg)})


# flow_convergence


def _flow_job(model: RenewalChainModel, n: int, t: float, f, rng: np.random.Generator) -> float:
    states = sample_mu_n_batch(model, n, f.p, rng)
    return flow_local_time(model, n, range(1, f.p + 1), t, f, states, rng)


def run_flow_convergence(cfg: ExperimentConfig) -> StatSummary:
    """Monte Carlo means of L_{n,I,t} along the n-grid against their limit, plus the
    deterministic renewal, strong-ratio and c_n checks.
    """
    params: FlowConvergenceParams = cfg.params
    tol = params.tolerances
    build(LocalTimeParams, beta=params.beta, p=params.p)
    model = RenewalChainModel(beta=params.beta)
    f = params.integrand
    limit = flow_moment_limit(params.beta, params.p, 1, params.t, mu_product(model, f))

    rows, means, errors, last = [], [], [], None
    for n in sorted(params.n_grid):
        job = functools.partial(_flow_job, model, n, params.t, f)
        last = np.array(map_replications(job, cfg.replications, cfg.master_seed,
                                         f"{cfg.kind.value}:{n}", cfg.threads))
        mean, se = stats.mean_and_se(last)
        rows.append({"n": n, "estimate": mean, "std_error": se, "limit": limit,
                     "rel_err": stats.rel_error(mean, limit)})
        means.append(abs(mean - limit))
        errors.append(se)
        logger.info("flow n=%d: %.5g ± %.2g (limit %.5g)", n, mean, se, limit)

    checks = [
        stats.check("flow_final_deviation", rows[-1]["rel_err"], tol.final_rel),
        stats.check("flow_deviation_trend", means[-1], tol.trend_se,
                    passed=stats.nonincreasing(means, errors, tol.trend_se)),
    ]
    u = renewal_sequence(model, params.renewal_n + 1)
    product = u[params.renewal_n] * b_n(model, params.renewal_n)
    checks.append(stats.check("renewal_product", product - 1.0, tol.renewal_product))
    checks.append(stats.check("strong_ratio", u[params.renewal_n + 1] / u[params.renewal_n] - 1.0, tol.strong_ratio))
    slope = c_n_slope(model, LevyModel.sas(params.alpha), params.p, *params.c_n_range)
    hurst = hurst_exponent(params.alpha, params.beta, params.p)
    checks.append(stats.check("c_n_slope", slope - hurst, tol.c_n_slope))

    write_csv(rows, output_dir(cfg.output_path, cfg.kind.value) / "flow.csv",
              columns=["n", "estimate", "std_error", "limit", "rel_err"])
    return _summary(cfg, last, checks=checks,
                    knobs={"limit": limit, "renewal_product": product, "c_n_slope": slope})


# clt_compare


def run_clt_compare(cfg: ExperimentConfig) -> StatSummary:
    """KS distance between S_n(1) and Γ(β_p) C_α^{-p/α} μ^{⊗p}(f) Z(1) along the n-grid."""
    params: CltCompareParams = cfg.params
    f = params.integrand
    if f.p != params.p:
        raise InvalidInputError(f"integrand arity {f.p} differs from p={params.p}")
    model = RenewalChainModel(beta=params.beta)
    levy = LevyModel.sas(params.alpha)
    beta_p = params.p * params.beta - params.p + 1
    factor = gamma(beta_p) * c_alpha(params.alpha) ** (-params.p / params.alpha) * mu_product(model, f)
    reference = factor * np.array([path.at(1.0) for path in _paths(cfg, [1.0])])

    rows, distances, spreads, last = [], [], [], None
    for n in sorted(params.n_grid):
        last = sample_partial_sums(
            model, levy, n, params.truncation, f, [1.0], cfg.replications, cfg.master_seed,
            cfg.threads, tag=cfg.kind.value,
        )[:, -1]
        boot_rng = replication_rng(cfg.master_seed, f"{cfg.kind.value}:bootstrap", n)
        ks, spread = stats.bootstrap_ks(last, reference, params.n_boot, boot_rng)
        _, pvalue = stats.ks_two_sample(last, reference)
        rows.append({"n": n, "ks": ks, "ks_se": spread, "pvalue": pvalue, "n_samples": cfg.replications})
        distances.append(ks)
        spreads.append(spread)
        logger.info("clt n=%d: KS %.4f ± %.4f", n, ks, spread)

    worst = max(
        ((b - a) / math.hypot(sa, sb) if math.hypot(sa, sb) > 0 else (math.inf if b > a else 0.0))
        for a, b, sa, sb in zip(distances, distances[1:], spreads, spreads[1:])
    ) if len(distances) > 1 else 0.0
    checks = [stats.check("clt_ks_trend", worst, params.tolerances.bootstrap_z,
                          passed=worst <= params.tolerances.bootstrap_z)]
    write_csv(rows, output_dir(cfg.output_path, cfg.kind.value) / "clt.csv",
              columns=["n", "ks", "ks_se", "pvalue", "n_samples"])
    return _summary(cfg, last, checks=checks, ks_statistic=distances[-1], knobs={"reference_factor": factor})


RUNNERS: Dict[ExperimentKind, Runner] = {
    ExperimentKind.COVERING_CHECK: run_covering_check,
    ExperimentKind.LOCALTIME_MOMENTS: run_localtime_moments,
    ExperimentKind.JOINT_MOMENTS: run_joint_moments,
    ExperimentKind.SIMULATE_Z: run_simulate_z,
    ExperimentKind.Z_SELFSIM: run_z_selfsim,
    ExperimentKind.FLOW_CONVERGENCE: run_flow_convergence,
    ExperimentKind.CLT_COMPARE: run_clt_compare,
}


def run_experiment(cfg: ExperimentConfig) -> StatSummary:
    """Run one experiment, log its checks and write summary.json next to its CSV files."""
    logger.info(
        "running %s: %d replications, seed %d, %d worker(s)",
        cfg.kind.value, cfg.replications, cfg.master_seed, cfg.threads,
    )
    summary = RUNNERS[cfg.kind](cfg)
    for result in summary.checks:
        log = logger.info if result.passed else logger.error
        log("check %s: %s (statistic %.4g, threshold %.4g)", result.name,
            "pass" if result.passed else "FAIL", result.statistic, result.threshold)
    write_summary(summary, output_dir(cfg.output_path, cfg.kind.value), cfg.resolved())
    logger.info("%s finished: %s", cfg.kind.value, "passed" if summary.passed else "failed")
    return summary
