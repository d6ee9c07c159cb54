"""
Kernels and moment formulas for intersection local times.

Joint moments E ∏ L_{I_ℓ,t_ℓ} and the conditional moments Ψ(v) are integrals of products of
power kernels over {x : lower_ℓ < x_ℓ < t_ℓ}. They are evaluated by stratified importance
sampling: the domain is split by the order of the free coordinates among the anchor points
(0, or the shifts v_i), and inside each stratum the consecutive gaps are drawn from a
Dirichlet proposal whose exponents match the kernel singularities on those gaps, so the
dominant singular factors cancel in the weights.
"""
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gamma, gammaln

from regen_stable.config import settings
from regen_stable.errors import InvalidInputError, SingularInputError
from regen_stable.models import IntegrationBudget, MomentEstimate, MomentMethod, MomentSpec

logger = logging.getLogger(__name__)

KERNEL_KINDS = ("h", "g", "g_eps", "f_eps")
_CHUNK = 1 << 15
_TINY = np.finfo(float).tiny


def _gamma_pair(beta: float) -> float:
    return gamma(beta) * gamma(2.0 - beta)


def f_eps(y, beta: float, epsilon: float):
    """f_ε(y) = (e^{y/ε-1} ε)^{β-1} for y <= ε and y^{β-1} beyond; vectorized."""
    y = np.asarray(y, dtype=float)
    near = np.minimum(y, epsilon)
    return np.where(y <= epsilon, (np.exp(near / epsilon - 1.0) * epsilon) ** (beta - 1.0),
                    np.maximum(y, epsilon) ** (beta - 1.0))


def kernel_eval(kind: str, beta: float, epsilon: Optional[float], x: Sequence[float]) -> float:
    """Evaluate h_q, g_q, g_{q,ε} at x (sorted internally) or f_ε at a single point.

    Raises:
        SingularInputError: on coinciding coordinates (or a zero coordinate for g kernels)
        InvalidInputError: on unknown kinds, missing ε, or negative g arguments
    """
    if kind not in KERNEL_KINDS:
        raise InvalidInputError(f"unknown kernel {kind!r}; expected one of {KERNEL_KINDS}")
    x = np.sort(np.atleast_1d(np.asarray(x, dtype=float)))
    if kind in ("g_eps", "f_eps") and (epsilon is None or epsilon <= 0):
        raise InvalidInputError(f"kernel {kind} needs epsilon > 0")
    if kind == "f_eps":
        if x.size != 1:
            raise InvalidInputError("f_eps takes a single point")
        return float(f_eps(x[0], beta, epsilon))
    if x.size == 0:
        return 1.0
    if kind == "h":
        gaps = np.diff(x)
        if np.any(gaps == 0):
            raise SingularInputError(f"h kernel evaluated on the diagonal: {x.tolist()}")
        return float(_gamma_pair(beta) * np.prod(gaps ** (beta - 1.0)))
    if x[0] < 0:
        raise InvalidInputError(f"{kind} kernel needs nonnegative arguments: {x.tolist()}")
    gaps = np.diff(np.concatenate(([0.0], x)))
    if np.any(gaps == 0):
        raise SingularInputError(f"{kind} kernel evaluated on the diagonal: {x.tolist()}")
    if kind == "g":
        return float(np.prod(gaps ** (beta - 1.0)))
    return float(np.prod(f_eps(gaps, beta, epsilon)))


def closed_increment_moment(beta: float, p: int, r: int, s: float, t: float) -> float:
    """E (L_{I,t} - L_{I,s})^r
    = Γ(β)^p Γ(2-β)^p r! / (Γ(β_p) Γ((r-1)β_p + 2)) (t-s)^{(r-1)β_p + 1}.

    Raises:
        InvalidInputError: unless 0 <= s <= t <= 1, r >= 1 and β_p in (0,1)
    """
    beta_p = p * beta - p + 1
    if not 0 < beta_p < 1:
        raise InvalidInputError(f"beta_p = {beta_p:.6g} must lie in (0,1)")
    if r < 1:
        raise InvalidInputError(f"moment order must be >= 1, got {r}")
    if not 0 <= s <= t <= 1:
        raise InvalidInputError(f"need 0 <= s <= t <= 1, got s={s}, t={t}")
    if s == t:
        return 0.0
    return (
        _gamma_pair(beta) ** p
        * math.factorial(r)
        / (gamma(beta_p) * gamma((r - 1) * beta_p + 2.0))
        * (t - s) ** ((r - 1) * beta_p + 1.0)
    )


def index_multiplicities(spec: MomentSpec) -> List[Tuple[int, ...]]:
    """𝓘(i) = {ℓ : i ∈ I_ℓ} for i = 1..K, with ℓ counted from 0."""
    return [
        tuple(ell for ell, index_set in enumerate(spec.index_sets) if i in index_set)
        for i in range(1, spec.K + 1)
    ]


# Stratified integrator


@dataclass(frozen=True)
class _Group:
    """One kernel factor: the free coordinates it couples and its anchor (g kernels only)."""

    members: Tuple[int, ...]
    anchor: Optional[float]


@dataclass
class _Stratum:
    """An ordering of the free coordinates among the anchors.

    Nodes run anchor_1, its free points, anchor_2, ..., and end with the top T; segment j is
    the gap between node j and node j+1.
    """

    slot_segments: List[Tuple[int, List[int]]]  # (slack segment, gap segments) per slot
    slot_lengths: np.ndarray
    slot_shapes: List[np.ndarray]  # Dirichlet shapes per slot: gap exponents then slack 1
    slot_log_norm: np.ndarray
    slot_anchor: np.ndarray
    pair_terms: List[Tuple[int, int, int]]  # (multiplicity, first segment, stop segment)
    coordinate_segment: Dict[int, Tuple[int, int]]  # coordinate -> (slot, position in slot)
    n_segments: int


@dataclass
class _Moments:
    n: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def merge(self, values: np.ndarray) -> None:
        # pairwise update of count, mean and squared deviations
        n_b = values.size
        if n_b == 0:
            return
        mean_b = float(values.mean())
        m2_b = float(((values - mean_b) ** 2).sum())
        n = self.n + n_b
        delta = mean_b - self.mean
        self.mean += delta * n_b / n
        self.m2 += m2_b + delta * delta * self.n * n_b / n
        self.n = n

    @property
    def variance(self) -> float:
        return self.m2 / (self.n - 1) if self.n > 1 else 0.0


class KernelProductIntegral:
    """∫ c ∏_g kernel_g(x) 1{lower_ℓ < x_ℓ < upper_ℓ} dx over the free coordinates.

    Each group g contributes (β-1) log of every consecutive gap among its members and, when
    it has an anchor a, (β-1) log(min member - a).
    """

    def __init__(
        self,
        beta: float,
        groups: Sequence[_Group],
        lower: Sequence[float],
        upper: Sequence[float],
        log_constant: float,
    ):
        self.beta = beta
        self.groups = list(groups)
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        self.r = self.lower.size
        self.log_constant = log_constant
        self.top = float(self.upper.max())
        anchors = {0.0} if all(g.anchor is None for g in self.groups) else set()
        anchors.update(g.anchor for g in self.groups if g.anchor is not None)
        self.anchors = np.array(sorted(a for a in anchors if a < self.top))
        self.strata = list(self._enumerate())

    # construction

    def _enumerate(self):
        m = self.anchors.size
        for assignment in itertools.product(range(m), repeat=self.r):
            slot_of = np.asarray(assignment)
            slot_anchor = self.anchors[slot_of]
            if np.any(slot_anchor < self.lower) or np.any(slot_anchor >= self.upper):
                continue
            members = [[ell for ell in range(self.r) if assignment[ell] == k] for k in range(m)]
            for orders in itertools.product(*(itertools.permutations(c) for c in members)):
                yield self._build(list(orders))

    def _build(self, orders: List[Tuple[int, ...]]) -> _Stratum:
        m = self.anchors.size
        node_of: Dict[object, int] = {}
        node = 0
        slot_segments = []
        coordinate_segment = {}
        for k in range(m):
            node_of[("a", float(self.anchors[k]))] = node
            gaps = []
            for position, ell in enumerate(orders[k]):
                node += 1
                node_of[("x", ell)] = node
                gaps.append(node - 1)
                coordinate_segment[ell] = (k, position)
            slot_segments.append((node, gaps))
            node += 1
        n_segments = node

        multiplicity: Dict[Tuple[int, int], int] = {}
        for g in self.groups:
            ordered = sorted(g.members, key=lambda ell: node_of[("x", ell)])
            pairs = [(node_of[("x", a)], node_of[("x", b)]) for a, b in zip(ordered, ordered[1:])]
            if g.anchor is not None:
                pairs.insert(0, (node_of[("a", g.anchor)], node_of[("x", ordered[0])]))
            for lo, hi in pairs:
                multiplicity[(lo, hi)] = multiplicity.get((lo, hi), 0) + 1

        slot_shapes = []
        slot_log_norm = np.empty(m)
        for k, (_, gaps) in enumerate(slot_segments):
            # a gap from node j to j+1 carries the exponent of the adjacent pair it spans
            shapes = [1.0 + (self.beta - 1.0) * multiplicity.get((j, j + 1), 0) for j in gaps]
            shapes = np.array(shapes + [1.0])
            slot_shapes.append(shapes)
            slot_log_norm[k] = gammaln(shapes.sum()) - gammaln(shapes).sum()
        slot_lengths = np.diff(np.append(self.anchors, self.top))
        pair_terms = [(count, lo, hi) for (lo, hi), count in sorted(multiplicity.items())]
        return _Stratum(
            slot_segments=slot_segments,
            slot_lengths=slot_lengths,
            slot_shapes=slot_shapes,
            slot_log_norm=slot_log_norm,
            slot_anchor=self.anchors.copy(),
            pair_terms=pair_terms,
            coordinate_segment=coordinate_segment,
            n_segments=n_segments,
        )

    # sampling

    def _weights(self, stratum: _Stratum, n: int, rng: np.random.Generator) -> np.ndarray:
        segs = np.empty((n, stratum.n_segments))
        log_proposal = np.zeros(n)
        x = np.empty((n, self.r))
        for k, (slack, gaps) in enumerate(stratum.slot_segments):
            length = stratum.slot_lengths[k]
            if not gaps:
                segs[:, slack] = length
                continue
            shapes = stratum.slot_shapes[k]
            draws = rng.standard_gamma(shapes, size=(n, shapes.size))
            parts = np.maximum(draws / draws.sum(axis=1, keepdims=True) * length, _TINY)
            segs[:, gaps] = parts[:, :-1]
            segs[:, slack] = parts[:, -1]
            log_proposal += (
                stratum.slot_log_norm[k]
                - (shapes.sum() - 1.0) * math.log(length)
                + ((shapes[:-1] - 1.0) * np.log(parts[:, :-1])).sum(axis=1)
            )
            positions = stratum.slot_anchor[k] + np.cumsum(parts[:, :-1], axis=1)
            for ell, (slot, position) in stratum.coordinate_segment.items():
                if slot == k:
                    x[:, ell] = positions[:, position]
        log_integrand = np.full(n, self.log_constant)
        for count, lo, hi in stratum.pair_terms:
            span = segs[:, lo] if hi == lo + 1 else segs[:, lo:hi].sum(axis=1)
            log_integrand += count * (self.beta - 1.0) * np.log(span)
        inside = np.all(x < self.upper, axis=1)
        return np.where(inside, np.exp(log_integrand - log_proposal), 0.0)

    def _run(self, stratum: _Stratum, n: int, rng: np.random.Generator, acc: _Moments) -> _Moments:
        done = 0
        while done < n:
            size = min(_CHUNK, n - done)
            acc.merge(self._weights(stratum, size, rng))
            done += size
        return acc

    def estimate(self, budget: IntegrationBudget) -> MomentEstimate:
        """Pilot run with equal allocation, then Neyman allocation of the remaining budget."""
        n_strata = len(self.strata)
        if n_strata == 0:
            return MomentEstimate(value=0.0, std_error=0.0, method=MomentMethod.QUADRATURE)
        streams = [
            np.random.Generator(np.random.PCG64(np.random.SeedSequence(budget.seed, spawn_key=(h,))))
            for h in range(n_strata)
        ]
        acc = [_Moments() for _ in range(n_strata)]
        pilot = max(int(budget.pilot_fraction * budget.evaluations / n_strata), 32)
        self._phase([pilot] * n_strata, streams, acc, budget.workers)

        value, se = self._combine(acc)
        used = sum(a.n for a in acc)
        remaining = budget.evaluations - used
        sigma = np.sqrt([a.variance for a in acc])
        if remaining > 0 and sigma.sum() > 0 and not self._precise(value, se, budget.rel_target):
            alloc = np.floor(remaining * sigma / sigma.sum()).astype(int)
            self._phase(alloc.tolist(), streams, acc, budget.workers)
            value, se = self._combine(acc)
        n_evaluations = sum(a.n for a in acc)
        partial = not self._precise(value, se, budget.rel_target)
        if partial:
            logger.warning(
                "integration budget of %d evaluations exhausted at relative SE %.3g (target %.3g)",
                budget.evaluations, se / abs(value) if value else float("inf"), budget.rel_target,
            )
        return MomentEstimate(
            value=value,
            std_error=se,
            method=MomentMethod.QUADRATURE,
            partial=partial,
            n_evaluations=n_evaluations,
        )

    def _phase(self, sizes, streams, acc, workers: int) -> None:
        jobs = [(h, n) for h, n in enumerate(sizes) if n > 0]
        if workers > 1 and len(jobs) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(self._run, self.strata[h], n, streams[h], acc[h]) for h, n in jobs]
                for future in futures:
                    future.result()
        else:
            for h, n in jobs:
                self._run(self.strata[h], n, streams[h], acc[h])

    @staticmethod
    def _combine(acc: List[_Moments]) -> Tuple[float, float]:
        value = math.fsum(a.mean for a in acc)
        var = math.fsum(a.variance / a.n for a in acc if a.n > 0)
        return value, math.sqrt(max(var, 0.0))

    @staticmethod
    def _precise(value: float, se: float, target: float) -> bool:
        if se == 0:
            return True
        return value != 0 and se / abs(value) <= target


def _default_budget() -> IntegrationBudget:
    return IntegrationBudget(
        evaluations=settings.INTEGRATION_BUDGET, rel_target=settings.INTEGRATION_REL_TARGET
    )


def _log_norm(spec: MomentSpec) -> float:
    return -spec.r * gammaln(spec.beta_p)


def joint_moment(
    spec: MomentSpec,
    budget: Optional[IntegrationBudget] = None,
    allow_closed_form: bool = True,
) -> MomentEstimate:
    """E ∏_ℓ L_{I_ℓ,t_ℓ} = (1/Γ(β_p)^r) ∫_{0<x<t} ∏_{i<=K} h_{|𝓘(i)|}(x_{𝓘(i)}) dx.

    Equal index sets with equal times go to the closed form unless allow_closed_form is off.
    """
    budget = budget or _default_budget()
    if any(t == 0 for t in spec.times):
        return MomentEstimate(value=0.0, std_error=0.0, method=MomentMethod.QUADRATURE)
    equal = len(set(spec.index_sets)) == 1 and len(set(spec.times)) == 1
    if allow_closed_form and equal:
        value = closed_increment_moment(spec.beta, spec.p, spec.r, 0.0, spec.times[0])
        return MomentEstimate(value=value, std_error=0.0, method=MomentMethod.CLOSED_FORM)
    groups = [_Group(members, None) for members in index_multiplicities(spec) if members]
    log_constant = _log_norm(spec) + len(groups) * math.log(_gamma_pair(spec.beta))
    integral = KernelProductIntegral(
        spec.beta, groups, np.zeros(spec.r), spec.times, log_constant
    )
    logger.debug("joint moment over %d strata", len(integral.strata))
    return integral.estimate(budget)


def psi_conditional(
    spec: MomentSpec,
    v: Sequence[float],
    budget: Optional[IntegrationBudget] = None,
) -> MomentEstimate:
    """Ψ(v) = (1/Γ(β_p)^r) ∫_{max v_{I_ℓ} < x_ℓ < t_ℓ} ∏_i g_{|𝓘(i)|}(x_{𝓘(i)} - v_i) dx.

    Raises:
        InvalidInputError: unless v has K entries in (0,1)
    """
    budget = budget or _default_budget()
    v = np.asarray(v, dtype=float)
    if v.shape != (spec.K,):
        raise InvalidInputError(f"expected {spec.K} shifts, got shape {v.shape}")
    if np.any(v <= 0) or np.any(v >= 1):
        raise InvalidInputError("shifts must lie in (0,1)")
    lower = np.array([max(v[i - 1] for i in index_set) for index_set in spec.index_sets])
    if np.any(lower >= np.asarray(spec.times)):
        return MomentEstimate(value=0.0, std_error=0.0, method=MomentMethod.QUADRATURE)
    groups = [
        _Group(members, float(v[i])) for i, members in enumerate(index_multiplicities(spec)) if members
    ]
    integral = KernelProductIntegral(spec.beta, groups, lower, spec.times, _log_norm(spec))
    return integral.estimate(budget)


def psi_shift_average(
    spec: MomentSpec,
    n_shifts: int,
    budget: IntegrationBudget,
    rng: np.random.Generator,
) -> MomentEstimate:
    """∫ Ψ(v) (1-β)^K ∏ v_i^{-β} dv over (0,1)^K, by drawing v from the shift law."""
    if n_shifts < 2:
        raise InvalidInputError("need at least two shifts for a standard error")
    values = np.empty(n_shifts)
    evaluations = 0
    for k in range(n_shifts):
        u = 1.0 - rng.random(spec.K)
        v = np.minimum(u ** (1.0 / (1.0 - spec.beta)), np.nextafter(1.0, 0.0))
        inner = psi_conditional(
            spec, v, budget.model_copy(update={"seed": int(rng.integers(2**63))})
        )
        values[k] = inner.value
        evaluations += inner.n_evaluations
    return MomentEstimate(
        value=float(values.mean()),
        std_error=float(values.std(ddof=1) / math.sqrt(n_shifts)),
        method=MomentMethod.MONTE_CARLO,
        n_evaluations=evaluations,
    )
