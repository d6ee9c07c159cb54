"""
Local-time approximants of intersection sets and Mittag–Leffler reference paths.
"""
import logging
import math
from typing import Dict, Optional, Sequence

import numpy as np
from scipy.special import gamma

from regen_stable.config import settings
from regen_stable.core import (
    IntervalSet,
    LocalTimePath,
    dilate,
    measure_upto,
    measure_upto_many,
    restrict,
)
from regen_stable.errors import InvalidInputError
from regen_stable.models import LocalTimeParams

logger = logging.getLogger(__name__)

KINGMAN_LADDER = (100, 1000, 10_000)


def _eps_normalizer(epsilon: float, params: LocalTimeParams) -> float:
    if epsilon <= 0:
        raise InvalidInputError(f"epsilon must be > 0, got {epsilon}")
    return (epsilon / math.e) ** (params.beta_p - 1.0) / gamma(params.beta_p)


def local_time_eps(
    set_: IntervalSet, s: float, t: float, epsilon: float, params: LocalTimeParams
) -> float:
    """ε-normalized occupation measure of set_ between s and t.

    Returns (1/Γ(β_p)) (ε/e)^{β_p-1} λ(set_ ∩ [s, t]).

    Raises:
        InvalidInputError: if s > t or either lies outside the window
    """
    if s > t:
        raise InvalidInputError(f"s={s} > t={t}")
    if set_.is_empty():
        return 0.0
    occupied = measure_upto(set_, t) - measure_upto(set_, s)
    return _eps_normalizer(epsilon, params) * occupied


def local_time_path(
    set_: IntervalSet, grid: Sequence[float], epsilon: float, params: LocalTimeParams
) -> LocalTimePath:
    grid = np.asarray(grid, dtype=float)
    values = _eps_normalizer(epsilon, params) * measure_upto_many(set_, grid)
    # cumulative sums may dip by an ulp between neighbouring grid points
    return LocalTimePath(grid=grid, values=np.maximum.accumulate(values))


def kingman_estimate(set_: IntervalSet, t: float, n: int, params: LocalTimeParams) -> float:
    """Finite-n Kingman functional Γ(2-β_p) n^{1-β_p} λ((set_ ∩ [0,t]) + [-1/2n, 1/2n])."""
    if n < 1:
        raise InvalidInputError(f"n must be >= 1, got {n}")
    if set_.is_empty():
        return 0.0
    sausage = dilate(restrict(set_, 0.0, t), 1.0 / n)
    upto = min(t + 0.5 / n, set_.window_hi)
    return gamma(2.0 - params.beta_p) * n ** (1.0 - params.beta_p) * measure_upto(sausage, upto)


def kingman_ladder(
    set_: IntervalSet,
    t: float,
    params: LocalTimeParams,
    ladder: Sequence[int] = KINGMAN_LADDER,
) -> Dict[int, float]:
    """Kingman estimates along an n-ladder; the largest n is the reported value."""
    return {int(n): kingman_estimate(set_, t, int(n), params) for n in sorted(ladder)}


def positive_stable(beta: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """One-sided β-stable draws with E exp(-λS) = exp(-λ^β) (Kanter's representation)."""
    if not 0 < beta < 1:
        raise InvalidInputError(f"beta must lie in (0,1), got {beta}")
    theta = np.pi * (1.0 - rng.random(size))
    w = rng.standard_exponential(size)
    a = (
        np.sin(beta * theta) ** beta * np.sin((1.0 - beta) * theta) ** (1.0 - beta) / np.sin(theta)
    ) ** (1.0 / (1.0 - beta))
    return (a / w) ** ((1.0 - beta) / beta)


def sample_mittag_leffler(
    beta: float,
    horizon: float,
    n_steps: Optional[int],
    rng: np.random.Generator,
    grid: Optional[Sequence[float]] = None,
) -> LocalTimePath:
    """Inverse of a β-stable subordinator σ (E exp(-λσ_s) = exp(-sλ^β)).

    σ is simulated with clock step 1/n_steps until it passes the horizon; the returned path
    is M(t) = (1/n_steps) #{k >= 1 : σ(k/n_steps) <= t} on `grid` (default 101 points).
    """
    n_steps = n_steps or settings.ML_STEPS_PER_UNIT
    grid = np.linspace(0.0, horizon, 101) if grid is None else np.asarray(grid, dtype=float)
    ds = 1.0 / n_steps
    scale = ds ** (1.0 / beta)
    chunks = []
    level = 0.0
    while level <= horizon:
        chunk = level + np.cumsum(scale * positive_stable(beta, n_steps, rng))
        chunks.append(chunk)
        level = float(chunk[-1])
    sigma = np.concatenate(chunks)
    values = ds * np.searchsorted(sigma, grid, side="right")
    return LocalTimePath(grid=grid, values=values.astype(float))


def mittag_leffler_moment(beta: float, r: int) -> float:
    """E M_β(1)^r = r! / Γ(1 + rβ)."""
    return math.factorial(r) / gamma(1.0 + r * beta)
