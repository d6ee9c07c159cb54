"""
Infinite-measure-preserving flows: the renewal chain and the Thaler map.

The countdown chain on {0, 1, 2, ...} moves j -> j-1 for j >= 1, and from 0 draws a fresh
return time τ and moves to τ-1. Its invariant measure is π_j = P(τ > j) with π_0 = 1, the
base set is A = {state 0}, and visits to A are the renewal epochs of τ. Orbits are generated
lazily: only the residual, and the returns still to come, are ever materialized.

The Thaler map backend provides map-level checks and orbit statistics only.
"""
import functools
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numba import njit
from scipy import stats
from scipy.signal import fftconvolve
from scipy.special import gamma

from regen_stable.config import settings
from regen_stable.errors import InvalidInputError
from regen_stable.models import (
    FlowState,
    IntegrandF,
    IntegrandKind,
    LevyModel,
    RenewalChainModel,
    SeriesTruncation,
    ThalerMapModel,
)
from regen_stable.services.moments import closed_increment_moment
from regen_stable.services.mstable import poisson_arrivals, rademacher, rho_inverse
from regen_stable.services.seeding import map_replications, split

logger = logging.getLogger(__name__)


def _gamma_pair(beta: float) -> float:
    return gamma(beta) * gamma(2.0 - beta)


# Rates


def wandering_rates(model: RenewalChainModel, n_max: int) -> np.ndarray:
    """w_1..w_{n_max} with w_n = P(τ <= n) + Σ_{j=1}^n P(τ > j)."""
    if n_max < 1:
        raise InvalidInputError(f"n must be >= 1, got {n_max}")
    n = np.arange(1, n_max + 1)
    tails = model.tail(n)
    return 1.0 - tails + np.cumsum(tails)


def wandering_rate(model: RenewalChainModel, n: int) -> float:
    return float(wandering_rates(model, n)[-1])


def b_n(model: RenewalChainModel, n):
    """b_n := Γ(β)Γ(2-β) w_n, used as an exact definition at finite n."""
    n_arr = np.atleast_1d(np.asarray(n, dtype=int))
    w = wandering_rates(model, int(n_arr.max()))[n_arr - 1]
    out = _gamma_pair(model.beta) * w
    return float(out[0]) if np.ndim(n) == 0 else out


def c_n(model: RenewalChainModel, levy: LevyModel, p: int, n):
    """c_n = n (ρ^←(1/w_n) / b_n)^p."""
    n_arr = np.atleast_1d(np.asarray(n, dtype=int))
    w = wandering_rates(model, int(n_arr.max()))[n_arr - 1]
    b = _gamma_pair(model.beta) * w
    out = n_arr * (np.asarray(rho_inverse(levy, 1.0 / w)) / b) ** p
    return float(out[0]) if np.ndim(n) == 0 else out


def c_n_slope(
    model: RenewalChainModel,
    levy: LevyModel,
    p: int,
    n_lo: int = 1000,
    n_hi: int = 1_000_000,
    points: int = 25,
) -> float:
    """Least-squares slope of log c_n against log n over a log-spaced grid."""
    grid = np.unique(np.geomspace(n_lo, n_hi, points).astype(int))
    fit = stats.linregress(np.log(grid), np.log(c_n(model, levy, p, grid)))
    return float(fit.slope)


# Renewal sequence


@njit(cache=True)
def _renewal_dp(f, n_max):
    u = np.zeros(n_max + 1)
    u[0] = 1.0
    for n in range(1, n_max + 1):
        s = 0.0
        for k in range(1, n + 1):
            s += f[k] * u[n - k]
        u[n] = s
    return u


def _renewal_newton(f: np.ndarray, n_max: int) -> np.ndarray:
    """Power series of 1/(1 - F(z)) to order n_max by Newton iteration with FFT products."""
    h = -f.copy()
    h[0] = 1.0
    size = n_max + 1
    g = np.array([1.0])
    k = 1
    while k < size:
        k = min(2 * k, size)
        hg = fftconvolve(h[:k], g)[:k]
        correction = fftconvolve(g, hg)[:k]
        g_new = -correction
        g_new[: g.size] += 2.0 * g
        g = g_new
    return g[:size]


def renewal_sequence(
    model: RenewalChainModel, n_max: int, fft_threshold: Optional[int] = None
) -> np.ndarray:
    """u_0..u_{n_max} with u_n = p^{(n)}(0, 0) = Σ_{k=1}^n f_k u_{n-k}, u_0 = 1."""
    if n_max < 1:
        raise InvalidInputError(f"n_max must be >= 1, got {n_max}")
    threshold = settings.RENEWAL_FFT_THRESHOLD if fft_threshold is None else fft_threshold
    f = np.zeros(n_max + 1)
    f[1:] = model.return_pmf(np.arange(1, n_max + 1))
    if n_max <= threshold:
        return _renewal_dp(f, n_max)
    logger.debug("renewal sequence to %d by FFT Newton inversion", n_max)
    return _renewal_newton(f, n_max)


# Return times and μ_n


class ReturnTimeSampler:
    """Inverse-CDF sampler of τ against a precomputed tail table; values above `cap` are
    reported as cap + 1.
    """

    def __init__(self, model: RenewalChainModel, cap: int):
        if cap < 1:
            raise InvalidInputError(f"cap must be >= 1, got {cap}")
        self.model = model
        self.cap = int(cap)
        self._neg_tail = -model.tail(np.arange(self.cap + 1))

    def _invert(self, u: np.ndarray) -> np.ndarray:
        # τ = #{k >= 0 : P(τ > k) >= u}
        return np.searchsorted(self._neg_tail, -u, side="right").astype(np.int64)

    def draw(self, size: int, rng: np.random.Generator) -> np.ndarray:
        return self._invert(1.0 - rng.random(size))

    def draw_at_most(self, n: int, size: int, rng: np.random.Generator) -> np.ndarray:
        """τ conditioned on τ <= n."""
        floor = float(self.model.tail(n))
        return self._invert(floor + (1.0 - floor) * (1.0 - rng.random(size)))


def sample_return_times(
    model: RenewalChainModel, size: int, cap: int, rng: np.random.Generator
) -> np.ndarray:
    return model.sample_return_times(size, cap, rng)


@functools.lru_cache(maxsize=64)
def _mu_n_cdf(model: RenewalChainModel, n: int) -> np.ndarray:
    weights = np.empty(n + 1)
    weights[0] = 1.0 - float(model.tail(n))
    weights[1:] = model.tail(np.arange(1, n + 1))
    cdf = np.cumsum(weights)
    return cdf / cdf[-1]


def mu_n_weights(model: RenewalChainModel, n: int) -> np.ndarray:
    """Start-state probabilities under μ_n: P(τ <= n)/w_n for 0, π_j/w_n for 1 <= j <= n."""
    return np.diff(np.concatenate(([0.0], _mu_n_cdf(model, n))))


def sample_mu_n_batch(
    model: RenewalChainModel, n: int, size: int, rng: np.random.Generator
) -> List[FlowState]:
    if n < 1:
        raise InvalidInputError(f"n must be >= 1, got {n}")
    states = np.searchsorted(_mu_n_cdf(model, n), rng.random(size), side="right")
    states = np.minimum(states, n)
    zeros = np.flatnonzero(states == 0)
    taus = ReturnTimeSampler(model, n).draw_at_most(n, zeros.size, rng)
    pending = dict(zip(zeros.tolist(), taus.tolist()))
    return [
        FlowState(state=int(s), pending_tau=pending.get(k)) for k, s in enumerate(states.tolist())
    ]


def sample_mu_n(model: RenewalChainModel, n: int, rng: np.random.Generator) -> FlowState:
    """Start state from μ_n = μ(· ∩ {φ <= n}) / w_n; from state 0 the first return is drawn
    conditioned on τ <= n.
    """
    return sample_mu_n_batch(model, n, 1, rng)[0]


def visit_epochs(
    state: FlowState,
    n: int,
    rng: np.random.Generator,
    sampler: ReturnTimeSampler,
) -> Tuple[np.ndarray, np.ndarray]:
    """Times k in [1, n] at which the orbit is in A, and the return time following each.

    Returns beyond sampler.cap are reported as cap + 1.
    """
    first = state.first_entrance()
    if first > n:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    epochs = [np.array([first], dtype=np.int64)]
    last = first
    chunk = 16
    while last <= n:
        gaps = sampler.draw(chunk, rng)
        times = last + np.cumsum(gaps)
        epochs.append(times)
        last = int(times[-1])
        chunk = min(chunk * 2, 4096)
    all_epochs = np.concatenate(epochs)
    inside = int(np.searchsorted(all_epochs, n, side="right"))
    return all_epochs[:inside], np.diff(all_epochs[: inside + 1])


def _filtered_epochs(
    f: IntegrandF, coordinate: int, epochs: np.ndarray, gaps: np.ndarray
) -> np.ndarray:
    if f.kind == IntegrandKind.INDICATOR:
        return epochs
    lo, hi = f.windows[coordinate]
    return epochs[(gaps >= lo) & (gaps <= hi)]


def _lookahead(f: IntegrandF) -> int:
    if f.kind == IntegrandKind.EXCURSION_WINDOW:
        return max(hi for _, hi in f.windows)
    return 0


def simultaneous_visits(epoch_sets: Sequence[np.ndarray]) -> np.ndarray:
    common = epoch_sets[0]
    for other in epoch_sets[1:]:
        common = np.intersect1d(common, other, assume_unique=True)
    return common


def mu_product(model: RenewalChainModel, f: IntegrandF) -> float:
    """μ^{⊗p}(f), exact for both integrand kinds."""
    if f.kind == IntegrandKind.INDICATOR:
        return f.scale
    probs = [float(model.tail(lo - 1) - model.tail(hi)) for lo, hi in f.windows]
    return f.scale * math.prod(probs)


def flow_local_time(
    model: RenewalChainModel,
    n: int,
    I: Sequence[int],
    t: float,
    f: IntegrandF,
    states: Sequence[FlowState],
    rng: np.random.Generator,
) -> float:
    """L_{n,I,t} = (b_n^p / n) Σ_{k=1}^{⌊nt⌋} f(T^k x_{i_1}, ..., T^k x_{i_p})."""
    p = len(states)
    if len(I) != p or f.p != p:
        raise InvalidInputError(f"index set, states and integrand must all have arity {f.p}")
    if not 0 <= t <= 1:
        raise InvalidInputError(f"t must lie in [0,1], got {t}")
    k_max = int(math.floor(n * t))
    if k_max == 0:
        return 0.0
    sampler = ReturnTimeSampler(model, max(n, _lookahead(f)) + 1)
    visits = []
    for j, state in enumerate(states):
        epochs, gaps = visit_epochs(state, n, rng, sampler)
        visits.append(_filtered_epochs(f, j, epochs, gaps))
    count = int(np.searchsorted(simultaneous_visits(visits), k_max, side="right"))
    return f.scale * count * b_n(model, n) ** p / n


def flow_moment_limit(beta: float, p: int, r: int, t: float, mu_f: float) -> float:
    """lim E L_{n,I,t}^r = μ^{⊗p}(f)^r Γ(β_p)^r E L_{I,t}^r."""
    beta_p = p * beta - p + 1
    return mu_f**r * gamma(beta_p) ** r * closed_increment_moment(beta, p, r, 0.0, t)


def sample_partial_sum(
    model: RenewalChainModel,
    levy: LevyModel,
    n: int,
    trunc: SeriesTruncation,
    f: IntegrandF,
    grid: Sequence[float],
    rng: np.random.Generator,
) -> np.ndarray:
    """S_n(t) = (1/c_n) Σ_{k<=⌊nt⌋} X_k on grid, with the truncated series
    X_k = p! Σ_{I ∈ D_p(m)} ∏_{i∈I} ε_i ρ^←(Γ_i/w_n) f(T^k x_{i_1}, ..., T^k x_{i_p}).
    """
    p = f.p
    trunc.check_for(p)
    grid = np.asarray(grid, dtype=float)
    if np.any(grid < 0) or np.any(grid > 1):
        raise InvalidInputError("grid must lie in [0, 1]")
    sign_rng, arrival_rng, orbit_rng = split(rng, 3)
    eps = rademacher(trunc.n_arrivals, sign_rng)
    arrivals = poisson_arrivals(trunc.n_arrivals, arrival_rng)
    w = wandering_rate(model, n)
    weights = eps[: trunc.m] * np.asarray(rho_inverse(levy, arrivals[: trunc.m] / w))

    sampler = ReturnTimeSampler(model, max(n, _lookahead(f)) + 1)
    raw = []
    for member_rng in split(orbit_rng, trunc.m):
        state = sample_mu_n(model, n, member_rng)
        raw.append(visit_epochs(state, n, member_rng, sampler))

    cutoffs = np.floor(n * grid).astype(np.int64)
    total = np.zeros(grid.size)
    for index_set in itertools.combinations(range(trunc.m), p):
        visits = [_filtered_epochs(f, j, *raw[i]) for j, i in enumerate(index_set)]
        common = simultaneous_visits(visits)
        if common.size == 0:
            continue
        counts = np.searchsorted(common, cutoffs, side="right")
        total += float(np.prod(weights[list(index_set)])) * counts
    return math.factorial(p) * f.scale * total / c_n(model, levy, p, n)


def _partial_sum_job(model, levy, n, trunc, f, grid, rng) -> np.ndarray:
    return sample_partial_sum(model, levy, n, trunc, f, grid, rng)


def sample_partial_sums(
    model: RenewalChainModel,
    levy: LevyModel,
    n: int,
    trunc: SeriesTruncation,
    f: IntegrandF,
    grid: Sequence[float],
    replications: int,
    master_seed: int,
    threads: int = 1,
    tag: str = "clt_compare",
) -> np.ndarray:
    """Replication-parallel sample_partial_sum; rows are replications."""
    job = functools.partial(_partial_sum_job, model, levy, n, trunc, f, np.asarray(grid, dtype=float))
    return np.vstack(map_replications(job, replications, master_seed, f"{tag}:{n}", threads))


def excursion_occupation(
    model: RenewalChainModel, n_excursions: int, j_max: int, rng: np.random.Generator
) -> np.ndarray:
    """Visits to states 0..j_max per excursion from 0; an excursion of length τ visits j iff
    τ > j, so the expected profile is π_j.
    """
    taus = model.sample_return_times(n_excursions, j_max + 1, rng)
    counts = np.bincount(np.minimum(taus, j_max + 1), minlength=j_max + 2)
    # visits to j = #{τ > j}
    return (n_excursions - np.cumsum(counts)[: j_max + 1]) / n_excursions


# Thaler backend


def _check_x(x: float) -> None:
    if not 0 <= x <= 1:
        raise InvalidInputError(f"x must lie in (0,1], got {x}")


@njit(cache=True)
def _thaler_map(x, q):
    d = x ** (q - 1.0) * math.expm1((1.0 - q) * math.log1p(x))
    y = x * math.exp(math.log1p(d) / (1.0 - q))
    return y - math.floor(y)


def thaler_step(model: ThalerMapModel, x: float) -> float:
    """T_q(x) = x (1 + (x/(1+x))^{q-1} - x^{q-1})^{1/(1-q)} mod 1."""
    _check_x(x)
    if x == 0:
        logger.warning("Thaler orbit started at the fixed point 0; the orbit is trapped")
        return 0.0
    return float(_thaler_map(float(x), model.q))


def thaler_density(model: ThalerMapModel, x):
    """Invariant density x^{-q} + (1+x)^{-q} on (0, 1]."""
    x = np.asarray(x, dtype=float)
    return x ** (-model.q) + (1.0 + x) ** (-model.q)


@njit(cache=True)
def _thaler_orbit(x0, q, a_lo, n):
    """Visit times to [a_lo, 1] along n steps from x0, and the final point."""
    visits = np.empty(n, dtype=np.int64)
    count = 0
    x = x0
    for k in range(1, n + 1):
        x = _thaler_map(x, q)
        if x == 0.0:
            break
        if x >= a_lo:
            visits[count] = k
            count += 1
    return visits[:count], x


def thaler_orbit(model: ThalerMapModel, x0: float, n: int) -> Tuple[np.ndarray, float]:
    """Times k in [1, n] with T^k x0 in A, and T^n x0 (0 when the orbit got trapped)."""
    _check_x(x0)
    if n < 1:
        raise InvalidInputError(f"n must be >= 1, got {n}")
    if x0 == 0:
        logger.warning("Thaler orbit started at the fixed point 0; the orbit is trapped")
        return np.empty(0, dtype=np.int64), 0.0
    visits, last = _thaler_orbit(float(x0), model.q, model.A_lo, int(n))
    return visits, float(last)


@dataclass(frozen=True, eq=False)
class ThalerOrbitStats:
    n_steps: int
    visits: int
    return_times: np.ndarray = field(repr=False)
    trapped: bool = False

    @property
    def occupation(self) -> float:
        return self.visits / self.n_steps


def thaler_orbit_stats(model: ThalerMapModel, x0: float, n: int) -> ThalerOrbitStats:
    """Occupation of A = [A_lo, 1] along an orbit and the return times between visits."""
    visits, last = thaler_orbit(model, x0, n)
    trapped = last == 0.0
    if trapped:
        logger.warning("Thaler orbit from x0=%r hit the fixed point 0 and is trapped", x0)
    return ThalerOrbitStats(
        n_steps=int(n), visits=int(visits.size), return_times=np.diff(visits), trapped=trapped
    )


def return_tail_slope(return_times: np.ndarray, n_lo: int = 10, n_hi: int = 1000) -> float:
    """Log-log slope of the empirical survival P(R > k) over log-spaced k in [n_lo, n_hi]."""
    r = np.sort(np.asarray(return_times))
    if r.size == 0:
        raise InvalidInputError("no return times to fit")
    ks = np.unique(np.geomspace(n_lo, n_hi, 20).astype(int))
    survival = 1.0 - np.searchsorted(r, ks, side="right") / r.size
    keep = survival > 0
    if keep.sum() < 3:
        raise InvalidInputError("too few return times beyond n_lo to fit a tail slope")
    fit = stats.linregress(np.log(ks[keep]), np.log(survival[keep]))
    return float(fit.slope)
