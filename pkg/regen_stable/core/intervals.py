"""
Exact algebra on finite unions of closed intervals inside a window [0, window_hi].

An IntervalSet is stored as two sorted float arrays (lower and upper endpoints). Canonical
form: intervals sorted, pairwise disjoint, separated by strictly positive gaps and contained
in [0, window_hi]. Degenerate intervals (single points) are allowed. Endpoints are never
snapped; all comparisons are exact.
"""
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from regen_stable.errors import InvalidInputError


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] with 0 <= lo <= hi."""

    lo: float
    hi: float

    def __post_init__(self):
        if self.lo < 0 or self.hi < 0:
            raise InvalidInputError(f"negative coordinate in interval [{self.lo}, {self.hi}]")
        if self.lo > self.hi:
            raise InvalidInputError(f"interval with lo > hi: [{self.lo}, {self.hi}]")


IntervalLike = Union[Interval, Tuple[float, float], Sequence[float]]


@dataclass(frozen=True, eq=False)
class IntervalSet:
    """Canonical finite union of disjoint closed intervals within [0, window_hi].

    Build instances with `canonicalize` or the helpers below; the constructor trusts its
    arguments.
    """

    window_hi: float
    lo: np.ndarray = field(repr=False)
    hi: np.ndarray = field(repr=False)

    @classmethod
    def empty(cls, window_hi: float) -> "IntervalSet":
        return cls(float(window_hi), np.empty(0), np.empty(0))

    @classmethod
    def full(cls, window_hi: float) -> "IntervalSet":
        return cls(float(window_hi), np.array([0.0]), np.array([float(window_hi)]))

    @property
    def n_intervals(self) -> int:
        return int(self.lo.size)

    def is_empty(self) -> bool:
        return self.lo.size == 0

    @property
    def intervals(self) -> List[Tuple[float, float]]:
        """Intervals as a list of (lo, hi) pairs."""
        return list(zip(self.lo.tolist(), self.hi.tolist()))

    def total_measure(self) -> float:
        return math.fsum((self.hi - self.lo).tolist())

    def contains(self, x: float) -> bool:
        """Point membership (intervals are closed)."""
        k = int(np.searchsorted(self.lo, x, side="right")) - 1
        return k >= 0 and x <= self.hi[k]

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return (
            self.window_hi == other.window_hi
            and np.array_equal(self.lo, other.lo)
            and np.array_equal(self.hi, other.hi)
        )

    def __repr__(self) -> str:
        return f"IntervalSet(window_hi={self.window_hi}, intervals={self.intervals})"

    def to_json(self) -> str:
        """Debug serialization: JSON array of [lo, hi] pairs."""
        return json.dumps([[a, b] for a, b in self.intervals])

    @classmethod
    def from_json(cls, text: str, window_hi: float) -> "IntervalSet":
        return canonicalize([tuple(pair) for pair in json.loads(text)], window_hi)


def _check_window(window_hi: float) -> None:
    if not window_hi > 0:
        raise InvalidInputError(f"window_hi must be > 0, got {window_hi}")


def _merge_sorted(lo: np.ndarray, hi: np.ndarray, window_hi: float) -> IntervalSet:
    """Merge closed intervals already sorted by lo; touching intervals merge."""
    if lo.size == 0:
        return IntervalSet.empty(window_hi)
    run_hi = np.maximum.accumulate(hi)
    # a new component starts where lo exceeds everything seen so far
    starts = np.empty(lo.size, dtype=bool)
    starts[0] = True
    starts[1:] = lo[1:] > run_hi[:-1]
    first = np.flatnonzero(starts)
    last = np.append(first[1:] - 1, lo.size - 1)
    return IntervalSet(float(window_hi), lo[first].copy(), run_hi[last].copy())


def _canonical_arrays(lo: np.ndarray, hi: np.ndarray, window_hi: float) -> IntervalSet:
    """Clip raw endpoint arrays to [0, window_hi], drop empty pieces, sort and merge."""
    lo = np.maximum(np.asarray(lo, dtype=float), 0.0)
    hi = np.minimum(np.asarray(hi, dtype=float), window_hi)
    keep = lo <= hi
    lo, hi = lo[keep], hi[keep]
    order = np.argsort(lo, kind="stable")
    return _merge_sorted(lo[order], hi[order], window_hi)


def canonicalize(raw: Iterable[IntervalLike], window_hi: float) -> IntervalSet:
    """Sort, merge and clip raw intervals to [0, window_hi].

    Raises:
        InvalidInputError: on negative coordinates, lo > hi, or window_hi <= 0
    """
    _check_window(window_hi)
    pairs = [(itv.lo, itv.hi) if isinstance(itv, Interval) else tuple(itv) for itv in raw]
    if not pairs:
        return IntervalSet.empty(window_hi)
    arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
    if np.any(arr < 0):
        raise InvalidInputError("negative coordinates in raw intervals")
    if np.any(arr[:, 0] > arr[:, 1]):
        raise InvalidInputError("raw interval with lo > hi")
    return _canonical_arrays(arr[:, 0], arr[:, 1], float(window_hi))


def from_arrays(lo: np.ndarray, hi: np.ndarray, window_hi: float) -> IntervalSet:
    """Vectorized canonicalize for endpoint arrays (negative parts are clipped, not rejected)."""
    _check_window(window_hi)
    return _canonical_arrays(lo, hi, float(window_hi))


def complement_within(s: IntervalSet, window_hi: Optional[float] = None) -> IntervalSet:
    """Closure of [0, window_hi] minus s.

    Zero-length boundary pieces are dropped; interior gaps are positive in canonical form.
    """
    w = s.window_hi if window_hi is None else float(window_hi)
    _check_window(w)
    if w != s.window_hi:
        s = _canonical_arrays(s.lo, s.hi, w)
    if s.is_empty():
        return IntervalSet.full(w)
    lo = np.concatenate(([0.0], s.hi))
    hi = np.concatenate((s.lo, [w]))
    keep = lo < hi
    # a point of s leaves two gaps that touch; merge them back into one interval
    return _merge_sorted(lo[keep], hi[keep], w)


def _intersect_pair(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    if a.is_empty() or b.is_empty():
        return IntervalSet.empty(a.window_hi)
    # for each interval of a, the b-intervals with hi >= a.lo and lo <= a.hi overlap it
    j_start = np.searchsorted(b.hi, a.lo, side="left")
    j_stop = np.searchsorted(b.lo, a.hi, side="right")
    counts = np.maximum(j_stop - j_start, 0)
    total = int(counts.sum())
    if total == 0:
        return IntervalSet.empty(a.window_hi)
    ia = np.repeat(np.arange(a.n_intervals), counts)
    offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    jb = np.repeat(j_start, counts) + offsets
    lo = np.maximum(a.lo[ia], b.lo[jb])
    hi = np.minimum(a.hi[ia], b.hi[jb])
    keep = lo <= hi
    # pairs come out sorted by (ia, jb), hence by lo
    return _merge_sorted(lo[keep], hi[keep], a.window_hi)


def intersect_many(sets: Sequence[IntervalSet]) -> IntervalSet:
    """Canonical intersection of sets sharing one window.

    Raises:
        InvalidInputError: when no sets are given or windows differ
    """
    sets = list(sets)
    if not sets:
        raise InvalidInputError("intersect_many needs at least one set")
    window = sets[0].window_hi
    if any(s.window_hi != window for s in sets):
        raise InvalidInputError("intersect_many: mismatched windows")
    # smallest first keeps intermediate results short; the result does not depend on order
    sets.sort(key=lambda s: s.n_intervals)
    result = sets[0]
    for other in sets[1:]:
        if result.is_empty():
            break
        result = _intersect_pair(result, other)
    return result


def union_many(sets: Sequence[IntervalSet]) -> IntervalSet:
    sets = list(sets)
    if not sets:
        raise InvalidInputError("union_many needs at least one set")
    window = sets[0].window_hi
    if any(s.window_hi != window for s in sets):
        raise InvalidInputError("union_many: mismatched windows")
    lo = np.concatenate([s.lo for s in sets])
    hi = np.concatenate([s.hi for s in sets])
    return _canonical_arrays(lo, hi, window)


def _check_time(s: IntervalSet, t: float) -> None:
    if t < 0 or t > s.window_hi:
        raise InvalidInputError(f"t={t} outside window [0, {s.window_hi}]")


def measure_upto(s: IntervalSet, t: float) -> float:
    """Lebesgue measure of s ∩ [0, t], summed with math.fsum."""
    _check_time(s, t)
    k = int(np.searchsorted(s.lo, t, side="left"))
    if k == 0:
        return 0.0
    lengths = np.minimum(s.hi[:k], t) - s.lo[:k]
    return math.fsum(lengths.tolist())


def measure_upto_many(s: IntervalSet, times: Sequence[float]) -> np.ndarray:
    """Vectorized measure_upto on an array of times."""
    times = np.asarray(times, dtype=float)
    if times.size and (times.min() < 0 or times.max() > s.window_hi):
        raise InvalidInputError(f"times outside window [0, {s.window_hi}]")
    if s.is_empty():
        return np.zeros_like(times)
    cum = np.concatenate(([0.0], np.cumsum(s.hi - s.lo)))
    k = np.searchsorted(s.lo, times, side="left")
    # intervals strictly before interval k-1 are complete; interval k-1 may be cut at t
    last = np.maximum(k - 1, 0)
    partial = np.where(k > 0, np.minimum(s.hi[last], times) - s.lo[last], 0.0)
    return np.where(k > 0, cum[last] + partial, 0.0)


def shift(s: IntervalSet, v: float) -> IntervalSet:
    """Translate by v >= 0 and clip to the window."""
    if v < 0:
        raise InvalidInputError(f"shift must be >= 0, got {v}")
    lo = s.lo + v
    hi = np.minimum(s.hi + v, s.window_hi)
    keep = lo <= s.window_hi
    # rounding in the translation can close a tiny gap, so re-merge
    return _merge_sorted(lo[keep], hi[keep], s.window_hi)


def dilate(s: IntervalSet, r: float) -> IntervalSet:
    """Minkowski sum with [-r/2, r/2], clipped to the window and re-canonicalized."""
    if r < 0:
        raise InvalidInputError(f"dilation radius must be >= 0, got {r}")
    if s.is_empty() or r == 0:
        return s
    return _merge_sorted(
        np.maximum(s.lo - r / 2.0, 0.0), np.minimum(s.hi + r / 2.0, s.window_hi), s.window_hi
    )


def restrict(s: IntervalSet, a: float, b: float) -> IntervalSet:
    """s ∩ [a, b]."""
    if a > b:
        raise InvalidInputError(f"restrict: a={a} > b={b}")
    a, b = max(a, 0.0), min(b, s.window_hi)
    if a > b:
        return IntervalSet.empty(s.window_hi)
    window = IntervalSet(s.window_hi, np.array([a]), np.array([b]))
    return _intersect_pair(s, window)
