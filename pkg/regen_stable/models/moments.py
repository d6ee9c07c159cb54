"""
Joint-moment request and estimate models.
"""
import json
from enum import Enum
from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator


class MomentMethod(str, Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"
    MONTE_CARLO = "monte_carlo"


class MomentSpec(BaseModel):
    """Index sets I_1..I_r in D_p, times t_1..t_r and (beta, p)."""

    model_config = ConfigDict(frozen=True)

    beta: float = Field(..., gt=0, lt=1)
    p: int = Field(..., ge=1)
    index_sets: Tuple[Tuple[int, ...], ...] = Field(..., min_length=1)
    times: Tuple[float, ...] = Field(..., min_length=1)

    @field_validator("index_sets")
    @classmethod
    def _strictly_increasing(cls, value):
        for index_set in value:
            if any(i < 1 for i in index_set):
                raise ValueError(f"indices must be positive integers: {index_set}")
            if any(a >= b for a, b in zip(index_set, index_set[1:])):
                raise ValueError(f"index set must be strictly increasing: {index_set}")
        return value

    @field_validator("times")
    @classmethod
    def _unit_times(cls, value):
        # the moment formula is stated on [0,1]; no extrapolation beyond it
        if any(not 0 <= t <= 1 for t in value):
            raise ValueError(f"times must lie in [0,1]: {value}")
        return value

    @model_validator(mode="after")
    def _consistent(self):
        if len(self.index_sets) != len(self.times):
            raise ValueError("index_sets and times must have the same length r")
        if any(len(index_set) != self.p for index_set in self.index_sets):
            raise ValueError(f"every index set must have exactly p={self.p} elements")
        if not 0 < self.beta_p < 1:
            raise ValueError(f"beta_p = {self.beta_p:.6g} must lie in (0,1)")
        return self

    @computed_field
    @property
    def beta_p(self) -> float:
        return self.p * self.beta - self.p + 1

    @property
    def r(self) -> int:
        return len(self.index_sets)

    @property
    def K(self) -> int:
        return max(max(index_set) for index_set in self.index_sets)

    def to_json(self) -> str:
        return json.dumps(
            {
                "beta": self.beta,
                "p": self.p,
                "index_sets": [list(s) for s in self.index_sets],
                "times": list(self.times),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "MomentSpec":
        return cls.model_validate_json(text)


class MomentEstimate(BaseModel):
    """A moment value with its standard error and how it was obtained."""

    value: float
    std_error: float = Field(default=0.0, ge=0)
    method: MomentMethod
    partial: bool = Field(default=False, description="Budget exhausted before target precision")
    n_evaluations: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _closed_form_exact(self):
        if self.method == MomentMethod.CLOSED_FORM and self.std_error != 0:
            raise ValueError("closed_form estimates carry std_error = 0")
        return self

    @property
    def relative_error(self) -> float:
        return self.std_error / abs(self.value) if self.value else float("inf")

    def to_json(self) -> str:
        return json.dumps(
            {"value": self.value, "std_error": self.std_error, "method": self.method.value}
        )


class IntegrationBudget(BaseModel):
    """Evaluation budget for the stratified integrator."""

    model_config = ConfigDict(frozen=True)

    evaluations: int = Field(default=1_000_000, ge=100)
    rel_target: float = Field(default=0.005, gt=0)
    seed: int = 0
    workers: int = Field(default=1, ge=1)
    pilot_fraction: float = Field(default=0.1, gt=0, lt=1)


def z_score(a: MomentEstimate, b: MomentEstimate) -> float:
    """(a - b) / combined standard error; inf when both are exact and differ."""
    combined = (a.std_error**2 + b.std_error**2) ** 0.5
    diff = a.value - b.value
    if combined == 0:
        return 0.0 if diff == 0 else float("inf")
    return diff / combined


