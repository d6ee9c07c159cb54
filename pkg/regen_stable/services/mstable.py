"""
Lévy-measure helpers, the series representation of multiple stable integrals and the
truncated-series sampler of Z_{α,β,p} on [0, 1].

Z(t) = p! C_α^{p/α} Σ_{I ∈ D_p(m)} ∏_{i∈I} ε_i Γ_i^{-1/α} L_t(⋂_{i∈I}(R_i + V_i)).
"""
import functools
import itertools
import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from scipy import integrate, optimize
from scipy.special import gamma, zeta

from regen_stable.core import ZPathSample
from regen_stable.errors import InvalidInputError
from regen_stable.models import LevyModel, LevyVariant, LocalTimeParams, SeriesTruncation, build
from regen_stable.services.localtime import local_time_path
from regen_stable.services.moments import closed_increment_moment
from regen_stable.services.regen import intersect_shifted, sample_family
from regen_stable.services.seeding import map_replications, split

logger = logging.getLogger(__name__)


def _check_alpha(alpha: float) -> None:
    if not 0 < alpha < 2:
        raise InvalidInputError(f"alpha must lie in (0,2), got {alpha}")


def c_alpha(alpha: float) -> float:
    """C_α = (∫_0^∞ sin(y) y^{-α} dy)^{-1} = 1 / (Γ(1-α) cos(πα/2)); C_1 = 2/π."""
    _check_alpha(alpha)
    if alpha == 1:
        return 2.0 / math.pi
    return 1.0 / (gamma(1.0 - alpha) * math.cos(math.pi * alpha / 2.0))


def c_alpha_quadrature(alpha: float) -> float:
    """C_α from the defining oscillatory integral.

    [0,1] uses QUADPACK's algebraic weight y^{1-α} on sin(y)/y; [1,∞) uses the Fourier
    sine weight (QAWF) on y^{-α}.
    """
    _check_alpha(alpha)
    head, _ = integrate.quad(
        lambda y: np.sinc(y / np.pi), 0.0, 1.0, weight="alg", wvar=(1.0 - alpha, 0.0),
        epsabs=1e-14, epsrel=1e-12,
    )
    tail, _ = integrate.quad(
        lambda y: y ** (-alpha), 1.0, np.inf, weight="sin", wvar=1.0, epsabs=1e-13, limlst=200,
    )
    return 1.0 / (head + tail)


def levy_tail(model: LevyModel, x: float) -> float:
    """ρ((x, ∞)) for x > 0."""
    if model.variant == LevyVariant.SAS:
        return c_alpha(model.alpha) * x ** (-model.alpha) / 2.0
    if model.variant == LevyVariant.BROKEN_POWER:
        exponent = model.alpha0 if x < 1 else model.alpha
        return model.scale * x ** (-exponent)
    return float(model.tail(x))


def _bisect_inverse(model: LevyModel, y: float) -> float:
    level = y / 2.0
    lo, hi = 1.0, 1.0
    for _ in range(2000):
        if levy_tail(model, lo) > level:
            break
        lo /= 2.0
        if lo < 1e-300:
            # finite measure: the tail never exceeds y/2
            return 0.0
    for _ in range(2000):
        if levy_tail(model, hi) <= level:
            break
        hi *= 2.0
    else:
        raise InvalidInputError("Lévy tail does not decay to y/2")
    if lo == hi:
        lo = hi / 2.0
    return optimize.bisect(
        lambda x: levy_tail(model, x) - level, lo, hi, xtol=1e-300, rtol=1e-13, maxiter=2000
    )


def rho_inverse(model: LevyModel, y):
    """ρ^←(y) = inf{x > 0 : ρ((x,∞)) <= y/2}; closed form for SαS, bisection otherwise.

    Raises:
        InvalidInputError: if any y <= 0
    """
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr <= 0):
        raise InvalidInputError("rho_inverse needs y > 0")
    if model.variant == LevyVariant.SAS:
        out = c_alpha(model.alpha) ** (1.0 / model.alpha) * y_arr ** (-1.0 / model.alpha)
    else:
        out = np.vectorize(functools.partial(_bisect_inverse, model), otypes=[float])(y_arr)
    return float(out) if out.ndim == 0 else out


def rademacher(size: int, rng: np.random.Generator) -> np.ndarray:
    return 2.0 * rng.integers(0, 2, size=size) - 1.0


def poisson_arrivals(n: int, rng: np.random.Generator) -> np.ndarray:
    """First n arrival times of a unit-rate Poisson process."""
    return np.cumsum(rng.standard_exponential(n))


def hurst_exponent(alpha: float, beta: float, p: int) -> float:
    """H = β_p + (1-β_p)/α."""
    _check_alpha(alpha)
    beta_p = p * beta - p + 1
    return beta_p + (1.0 - beta_p) / alpha


def _check_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise InvalidInputError("grid must be a non-empty 1-d sequence")
    if np.any(grid < 0) or np.any(grid > 1) or np.any(np.diff(grid) < 0):
        raise InvalidInputError("grid must be sorted inside [0, 1]")
    return grid


def sample_Z_path(
    alpha: float,
    beta: float,
    p: int,
    trunc: SeriesTruncation,
    epsilon_cover: float,
    grid: Sequence[float],
    rng: np.random.Generator,
    signs: Optional[np.ndarray] = None,
) -> ZPathSample:
    """One truncated-series path of Z_{α,β,p} on grid.

    Signs, arrivals and coverings come from three child streams of rng, in that order;
    `signs` replaces the Rademacher draws when given; the sign stream is then left unused,
    so arrivals and coverings are the same as without it.

    Raises:
        InvalidInputError: on infeasible β_p, m < p, or a bad grid
    """
    _check_alpha(alpha)
    params = build(LocalTimeParams, beta=beta, p=p)
    trunc.check_for(p)
    grid = _check_grid(grid)
    sign_rng, arrival_rng, cover_rng = split(rng, 3)
    if signs is None:
        eps = rademacher(trunc.n_arrivals, sign_rng)
    else:
        eps = np.asarray(signs, dtype=float)
        if eps.shape != (trunc.n_arrivals,):
            raise InvalidInputError(f"signs must have shape ({trunc.n_arrivals},)")
    arrivals = poisson_arrivals(trunc.n_arrivals, arrival_rng)
    family = sample_family(beta, epsilon_cover, 1.0, range(1, trunc.m + 1), cover_rng)
    weights = eps * arrivals ** (-1.0 / alpha)

    total = np.zeros_like(grid)
    for index_set in itertools.combinations(range(1, trunc.m + 1), p):
        coefficient = float(np.prod(weights[[i - 1 for i in index_set]]))
        intersection = intersect_shifted(family.restrict_to(index_set))
        if intersection.is_empty():
            continue
        total += coefficient * local_time_path(intersection, grid, epsilon_cover, params).values
    scale = math.factorial(p) * c_alpha(alpha) ** (p / alpha)
    values = scale * total
    values[grid == 0] = 0.0
    return ZPathSample(
        grid=grid,
        values=values,
        params=(alpha, beta, p),
        truncation=trunc,
        epsilon_cover=epsilon_cover,
    )


def _z_path_job(alpha, beta, p, trunc, epsilon_cover, grid, rng) -> ZPathSample:
    return sample_Z_path(alpha, beta, p, trunc, epsilon_cover, grid, rng)


def sample_Z_paths(
    alpha: float,
    beta: float,
    p: int,
    trunc: SeriesTruncation,
    epsilon_cover: float,
    grid: Sequence[float],
    replications: int,
    master_seed: int,
    threads: int = 1,
    tag: str = "simulate_z",
) -> List[ZPathSample]:
    """Replication-parallel sample_Z_path; path k uses replication stream k of `tag`."""
    job = functools.partial(_z_path_job, alpha, beta, p, trunc, epsilon_cover, np.asarray(grid, dtype=float))
    return map_replications(job, replications, master_seed, tag, threads)


def elementary_symmetric(weights: Sequence[float], p: int) -> float:
    """e_p(w) = Σ_{i_1 < ... < i_p} w_{i_1} ... w_{i_p}."""
    e = np.zeros(p + 1)
    e[0] = 1.0
    for w in np.asarray(weights, dtype=float):
        e[1:] = e[1:] + w * e[:-1]
    return float(e[p])


def truncation_tail(alpha: float, beta: float, p: int, arrivals: np.ndarray, m: int) -> float:
    """(p!)² C_α^{2p/α} E L_{I,1}² Σ_{I: m < max I <= n} ∏ Γ_i^{-2/α} for given arrivals."""
    weights = np.asarray(arrivals, dtype=float) ** (-2.0 / alpha)
    tail = elementary_symmetric(weights, p) - elementary_symmetric(weights[:m], p)
    scale = math.factorial(p) ** 2 * c_alpha(alpha) ** (2.0 * p / alpha)
    return scale * closed_increment_moment(beta, p, 2, 0.0, 1.0) * max(tail, 0.0)


def truncation_diagnostic(
    alpha: float, beta: float, p: int, trunc: SeriesTruncation, rng: np.random.Generator
) -> float:
    """Second-moment proxy of the series terms with m < max I <= n_arrivals; 0 when m = n_arrivals."""
    _check_alpha(alpha)
    trunc.check_for(p)
    arrivals = poisson_arrivals(trunc.n_arrivals, rng)
    if trunc.m == trunc.n_arrivals:
        return 0.0
    return truncation_tail(alpha, beta, p, arrivals, trunc.m)


def unsimulated_tail_bound(alpha: float, p: int, n_arrivals: int) -> float:
    """Order of the terms with max I > n_arrivals, using E Γ_i^{-2/α} ≈ i^{-2/α}:
    Σ_{i>n} i^{-2/α} (Σ_{i>=1} i^{-2/α})^{p-1}.
    """
    _check_alpha(alpha)
    s = 2.0 / alpha
    return float(zeta(s, n_arrivals + 1) * zeta(s, 1) ** (p - 1))
