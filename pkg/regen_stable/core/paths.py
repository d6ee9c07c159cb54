"""
Sampled paths: local-time paths and series samples of Z.
"""
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from regen_stable.errors import InvalidInputError
from regen_stable.models.stable import SeriesTruncation


@dataclass(frozen=True, eq=False)
class LocalTimePath:
    """Nondecreasing path t -> L_t sampled on a sorted grid."""

    grid: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.grid.shape != self.values.shape:
            raise InvalidInputError("grid and values must have the same shape")
        if np.any(np.diff(self.grid) < 0):
            raise InvalidInputError("grid must be sorted")
        if np.any(np.diff(self.values) < 0):
            raise InvalidInputError("local-time path must be nondecreasing")

    def at(self, t: float) -> float:
        """Value at the last grid time <= t."""
        k = int(np.searchsorted(self.grid, t, side="right")) - 1
        return float(self.values[max(k, 0)])


@dataclass(frozen=True, eq=False)
class ZPathSample:
    """One truncated-series sample of Z_{alpha,beta,p} on a grid in [0,1]."""

    grid: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    params: Tuple[float, float, int]
    truncation: SeriesTruncation
    epsilon_cover: float

    def at(self, t: float) -> float:
        k = int(np.searchsorted(self.grid, t, side="right")) - 1
        return float(self.values[max(k, 0)])
