"""
β-stable regenerative sets at resolution ε via the Poisson random covering scheme.

A covering is a Poisson process of points (y, z) on [0, horizon] x [ε, ∞) with intensity
(1-β) dy z^-2 dz; each point covers the open interval (y, y+z) and the uncovered closed set is
the regenerative set at resolution ε. Lowering ε adds an independent layer of shorter
intervals, so uncovered sets at successive resolutions are nested.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from regen_stable.config import settings
from regen_stable.core import (
    IntervalSet,
    complement_within,
    from_arrays,
    intersect_many,
    restrict,
    shift,
)
from regen_stable.errors import InvalidInputError
from regen_stable.models import CoveringConfig, build
from regen_stable.services.localtime import positive_stable
from regen_stable.services.moments import f_eps
from regen_stable.services.seeding import split

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CoveringSample:
    """Covering points (y, z) and the uncovered set they leave in [0, horizon]."""

    y: np.ndarray = field(repr=False)
    z: np.ndarray = field(repr=False)
    uncovered: IntervalSet
    config: CoveringConfig

    @property
    def points(self) -> List[Tuple[float, float]]:
        return list(zip(self.y.tolist(), self.z.tolist()))

    @property
    def n_points(self) -> int:
        return int(self.y.size)


@dataclass(frozen=True, eq=False)
class ShiftedFamily:
    """Independent coverings R_i with shifts v_i, keyed by index i."""

    index_set: Tuple[int, ...]
    members: Tuple[Tuple[CoveringSample, float], ...]

    def __post_init__(self):
        if len(self.index_set) != len(self.members):
            raise InvalidInputError("one member per index is required")

    @property
    def shifts(self) -> np.ndarray:
        return np.array([v for _, v in self.members])

    def restrict_to(self, index_set: Iterable[int]) -> "ShiftedFamily":
        """Sub-family for an index set drawn from this family's indices."""
        index_set = tuple(index_set)
        position = {i: k for k, i in enumerate(self.index_set)}
        missing = [i for i in index_set if i not in position]
        if missing:
            raise InvalidInputError(f"indices {missing} not in family {self.index_set}")
        return ShiftedFamily(index_set, tuple(self.members[position[i]] for i in index_set))


def _covered_set(y: np.ndarray, z: np.ndarray, horizon: float) -> IntervalSet:
    return from_arrays(y, y + z, horizon)


def sample_covering(cfg: CoveringConfig, rng: np.random.Generator) -> CoveringSample:
    """Draw an ε-covering of [0, horizon] and its uncovered set.

    The point count is Poisson((1-β) horizon / ε), y is uniform on [0, horizon] and
    z = ε / U; lengths beyond COVERING_Z_CAP_FACTOR * horizon are capped, which does not
    change the covered part of the window.
    """
    if cfg.epsilon <= 0:
        raise InvalidInputError(f"epsilon must be > 0, got {cfg.epsilon}")
    n = rng.poisson((1.0 - cfg.beta) * cfg.horizon / cfg.epsilon)
    y = rng.uniform(0.0, cfg.horizon, size=n)
    z = cfg.epsilon / (1.0 - rng.random(n))
    np.minimum(z, settings.COVERING_Z_CAP_FACTOR * cfg.horizon, out=z)
    uncovered = complement_within(_covered_set(y, z, cfg.horizon))
    return CoveringSample(y=y, z=z, uncovered=uncovered, config=cfg)


def refine_covering(
    s: CoveringSample, epsilon_new: float, rng: np.random.Generator
) -> CoveringSample:
    """Add an independent layer with z in [epsilon_new, ε) and shrink the uncovered set.

    Raises:
        InvalidInputError: unless 0 < epsilon_new < current ε
    """
    eps = s.config.epsilon
    if not 0 < epsilon_new < eps:
        raise InvalidInputError(f"refinement needs 0 < epsilon_new < {eps}, got {epsilon_new}")
    horizon = s.config.horizon
    n = rng.poisson((1.0 - s.config.beta) * horizon * (1.0 / epsilon_new - 1.0 / eps))
    y = rng.uniform(0.0, horizon, size=n)
    # 1/z uniform on (1/eps, 1/epsilon_new] gives density ∝ z^-2 on [epsilon_new, eps)
    z = 1.0 / (1.0 / eps + (1.0 / epsilon_new - 1.0 / eps) * (1.0 - rng.random(n)))
    layer_gaps = complement_within(_covered_set(y, z, horizon))
    uncovered = intersect_many([s.uncovered, layer_gaps])
    return CoveringSample(
        y=np.concatenate((s.y, y)),
        z=np.concatenate((s.z, z)),
        uncovered=uncovered,
        config=s.config.model_copy(update={"epsilon": epsilon_new}),
    )


def shift_from_uniform(u, beta: float):
    """Inverse CDF of the shift law P(V <= v) = v^(1-β) on (0, 1]."""
    return np.power(u, 1.0 / (1.0 - beta))


def sample_shift(beta: float, rng: np.random.Generator) -> float:
    if not 0 < beta < 1:
        raise InvalidInputError(f"beta must lie in (0,1), got {beta}")
    return float(shift_from_uniform(1.0 - rng.random(), beta))


def sample_shifts(beta: float, size: int, rng: np.random.Generator) -> np.ndarray:
    if not 0 < beta < 1:
        raise InvalidInputError(f"beta must lie in (0,1), got {beta}")
    return shift_from_uniform(1.0 - rng.random(size), beta)


def sample_family(
    beta: float,
    epsilon: float,
    horizon: float,
    index_set: Sequence[int],
    rng: np.random.Generator,
    shifts: Optional[Sequence[float]] = None,
) -> ShiftedFamily:
    """Independent shifted coverings, one per index, each on its own child stream.

    Shifts are drawn first from the member's stream unless given explicitly.
    """
    cfg = build(CoveringConfig, beta=beta, epsilon=epsilon, horizon=horizon)
    index_set = tuple(int(i) for i in index_set)
    if shifts is not None and len(shifts) != len(index_set):
        raise InvalidInputError("one shift per index is required")
    members = []
    for k, child in enumerate(split(rng, len(index_set))):
        v = sample_shift(beta, child) if shifts is None else float(shifts[k])
        if v < 0:
            raise InvalidInputError(f"shift must be >= 0, got {v}")
        members.append((sample_covering(cfg, child), v))
    return ShiftedFamily(index_set, tuple(members))


def intersect_shifted(fam: ShiftedFamily) -> IntervalSet:
    """Canonical intersection of the shifted uncovered sets, clipped to the window.

    Raises:
        InvalidInputError: when members do not share one horizon
    """
    if not fam.members:
        raise InvalidInputError("empty family")
    horizons = {sample.config.horizon for sample, _ in fam.members}
    if len(horizons) != 1:
        raise InvalidInputError(f"mismatched horizons in family: {sorted(horizons)}")
    return intersect_many([shift(sample.uncovered, v) for sample, v in fam.members])


def coverage_probability(x, beta: float, epsilon: float) -> float:
    """P(x_1, ..., x_q all uncovered) = (e/ε)^{q(β-1)} ∏_j f_ε(x_j - x_{j-1}), x_0 = 0."""
    points = np.sort(np.atleast_1d(np.asarray(x, dtype=float)))
    if np.any(points <= 0) or np.any(np.diff(points) == 0):
        raise InvalidInputError("coverage points must be positive and distinct")
    gaps = np.diff(np.concatenate(([0.0], points)))
    q = points.size
    prefactor = (math.e / epsilon) ** (q * (beta - 1.0))
    return float(prefactor * np.prod(f_eps(gaps, beta, epsilon)))


def layer_survival_probability(beta: float, eta: float, epsilon: float, p: int = 1) -> float:
    """Probability that a point beyond ε survives a refinement layer for p coverings."""
    if not 0 < eta < epsilon:
        raise InvalidInputError("need 0 < eta < epsilon")
    return (eta / epsilon) ** (p * (1.0 - beta))


@dataclass(frozen=True, eq=False)
class SubordinatorRange:
    """Range of a β-stable subordinator sampled on a clock grid."""

    points: IntervalSet
    clock_step: float
    local_time: float  # first clock time at which the subordinator passes the horizon


def sample_subordinator_range(
    beta: float, horizon: float, n_steps: int, rng: np.random.Generator
) -> SubordinatorRange:
    """Range of σ with E exp(-λσ_s) = exp(-s λ^β), clock step 1/n_steps, as an IntervalSet
    of degenerate intervals, for cross-checking the covering construction.
    """
    if not 0 < beta < 1:
        raise InvalidInputError(f"beta must lie in (0,1), got {beta}")
    ds = 1.0 / n_steps
    scale = ds ** (1.0 / beta)
    values: List[np.ndarray] = []
    level = 0.0
    steps = 0
    while level <= horizon:
        chunk = level + np.cumsum(scale * positive_stable(beta, n_steps, rng))
        values.append(chunk)
        passed = np.flatnonzero(chunk > horizon)
        if passed.size:
            steps += int(passed[0]) + 1
            break
        steps += n_steps
        level = float(chunk[-1])
    sigma = np.concatenate([[0.0]] + values)
    sigma = sigma[sigma <= horizon]
    return SubordinatorRange(
        points=from_arrays(sigma, sigma, horizon), clock_step=ds, local_time=steps * ds
    )


def stationarity_profile(
    beta: float,
    epsilon: float,
    delta: float,
    offsets: Sequence[float],
    replications: int,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, np.ndarray]:
    """Mean and standard error of the measure of shift(R, V) ∩ [a, a+δ] for each offset a."""
    offsets = np.asarray(offsets, dtype=float)
    if np.any(offsets < 0) or np.any(offsets + delta > 1):
        raise InvalidInputError("offsets must satisfy 0 <= a <= 1 - delta")
    cfg = build(CoveringConfig, beta=beta, epsilon=epsilon, horizon=1.0)
    samples = np.empty((replications, offsets.size))
    for k, child in enumerate(split(rng, replications)):
        v = sample_shift(beta, child)
        shifted = shift(sample_covering(cfg, child).uncovered, v)
        for j, a in enumerate(offsets):
            samples[k, j] = restrict(shifted, a, a + delta).total_measure()
    mean = samples.mean(axis=0)
    se = samples.std(axis=0, ddof=1) / math.sqrt(replications)
    logger.debug("stationarity profile over %d offsets, %d replications", offsets.size, replications)
    return mean, se

