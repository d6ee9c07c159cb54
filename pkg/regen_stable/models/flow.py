"""
Models of the infinite-measure-preserving systems and the integrands evaluated on them.
"""
from enum import Enum
from typing import Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class RenewalChainModel(BaseModel):
    """Countdown chain on {0, 1, 2, ...}: state 0 draws a return time tau and moves to tau-1,
    state j >= 1 moves to j-1. Base set A = {x(0) = 0}; invariant measure pi_j = P(tau > j).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    beta: float = Field(default=0.75, gt=0, lt=1)
    return_tail: Optional[Callable[[np.ndarray], np.ndarray]] = Field(default=None, exclude=True)

    def tail(self, n) -> np.ndarray:
        """P(tau > n), vectorized; default (n+1)^-beta."""
        n = np.asarray(n, dtype=float)
        if self.return_tail is None:
            return (n + 1.0) ** (-self.beta)
        return np.asarray(self.return_tail(n), dtype=float)

    def return_pmf(self, k) -> np.ndarray:
        """f_k = P(tau = k) for k >= 1."""
        k = np.asarray(k, dtype=float)
        return self.tail(k - 1) - self.tail(k)

    def invariant_weight(self, j) -> np.ndarray:
        """pi_j = P(tau > j); pi_0 = 1."""
        return self.tail(j)

    def sample_return_times(self, size: int, cap: int, rng: np.random.Generator) -> np.ndarray:
        """Inverse-CDF draws of tau; draws beyond `cap` are reported as cap + 1."""
        neg_tail = -self.tail(np.arange(cap + 1))
        u = 1.0 - rng.random(size)
        return np.searchsorted(neg_tail, -u, side="right").astype(np.int64)


class ThalerMapModel(BaseModel):
    """Interval map T_q with an indifferent fixed point at 0 and base set A = [A_lo, 1]."""

    model_config = ConfigDict(frozen=True)

    q: float = Field(default=4.0 / 3.0, gt=1)
    A_lo: float = Field(default=0.5, gt=0, lt=1)

    @property
    def beta(self) -> float:
        return 1.0 / self.q


class IntegrandKind(str, Enum):
    INDICATOR = "indicator"
    EXCURSION_WINDOW = "excursion_window"


class IntegrandF(BaseModel):
    """Product integrand on A^p.

    indicator: f = scale * 1_{A^p}.
    excursion_window: f = scale * prod_j 1{x_j(0) = 0, lo_j <= next return of x_j <= hi_j},
    a cylinder function read one step ahead along the orbit.
    """

    model_config = ConfigDict(frozen=True)

    kind: IntegrandKind = IntegrandKind.INDICATOR
    p: int = Field(default=2, ge=1)
    scale: float = 1.0
    windows: Optional[List[Tuple[int, int]]] = None

    @model_validator(mode="after")
    def _windows(self):
        if self.kind == IntegrandKind.EXCURSION_WINDOW:
            if self.windows is None or len(self.windows) != self.p:
                raise ValueError("excursion_window needs one (lo, hi) window per coordinate")
            if any(lo < 1 or hi < lo for lo, hi in self.windows):
                raise ValueError("excursion windows need 1 <= lo <= hi")
        return self

    def scaled(self, factor: float) -> "IntegrandF":
        return self.model_copy(update={"scale": self.scale * factor})


class FlowBackend(str, Enum):
    RENEWAL = "renewal"
    THALER = "thaler"


class FlowState(BaseModel):
    """Position of one orbit.

    renewal: current residual `state` (>= 0) and, when the orbit starts in 0 with its first
    return already drawn, that return time in `pending_tau`.
    thaler: current point `x` in (0, 1].
    """

    backend: FlowBackend = FlowBackend.RENEWAL
    state: int = Field(default=0, ge=0)
    pending_tau: Optional[int] = Field(default=None, ge=1)
    x: Optional[float] = Field(default=None, gt=0, le=1)
    k: int = Field(default=0, ge=0)

    def first_entrance(self) -> int:
        """phi = first k >= 1 with T^k x in A (renewal backend)."""
        if self.state > 0:
            return self.state
        if self.pending_tau is None:
            raise ValueError("first entrance from state 0 needs the pending return time")
        return self.pending_tau
