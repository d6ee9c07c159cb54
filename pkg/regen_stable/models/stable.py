"""
Lévy-measure and series-truncation models for multiple stable integrals.
"""
from enum import Enum
from typing import Callable, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from regen_stable.errors import InvalidInputError


class LevyVariant(str, Enum):
    SAS = "sas"
    CUSTOM = "custom"
    BROKEN_POWER = "broken_power"


class LevyModel(BaseModel):
    """Symmetric Lévy measure rho described by its tail x -> rho((x, inf)).

    SaS: rho((x,inf)) = C_alpha x^-alpha / 2.
    broken_power: scale * x^-alpha0 below 1, scale * x^-alpha above 1.
    custom: any nonincreasing tail, RV(-alpha) at infinity and O(x^-alpha0) at 0.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    variant: LevyVariant = LevyVariant.SAS
    alpha: float = Field(..., gt=0, lt=2)
    alpha0: Optional[float] = Field(default=None, gt=0, lt=2)
    scale: float = Field(default=1.0, gt=0)
    tail: Optional[Callable[[float], float]] = Field(default=None, exclude=True)

    @model_validator(mode="after")
    def _variant_fields(self):
        if self.variant == LevyVariant.CUSTOM and self.tail is None:
            raise ValueError("custom Lévy model needs a tail function")
        if self.variant != LevyVariant.SAS and self.alpha0 is None:
            raise ValueError(f"{self.variant.value} Lévy model needs alpha0 < 2")
        return self

    @classmethod
    def sas(cls, alpha: float) -> "LevyModel":
        return cls(variant=LevyVariant.SAS, alpha=alpha)

    @classmethod
    def custom(cls, tail: Callable[[float], float], alpha: float, alpha0: float) -> "LevyModel":
        return cls(variant=LevyVariant.CUSTOM, tail=tail, alpha=alpha, alpha0=alpha0)

    @classmethod
    def broken_power(cls, alpha: float, alpha0: float, scale: float = 1.0) -> "LevyModel":
        return cls(variant=LevyVariant.BROKEN_POWER, alpha=alpha, alpha0=alpha0, scale=scale)


class SeriesTruncation(BaseModel):
    """Series cutoff m (I in D_p(m)) and number of simulated Poisson arrivals."""

    model_config = ConfigDict(frozen=True)

    m: int = Field(default=12, ge=1)
    n_arrivals: int = Field(default=50, ge=1)

    @model_validator(mode="after")
    def _ordered(self):
        if self.n_arrivals < self.m:
            raise ValueError(f"n_arrivals={self.n_arrivals} must be >= m={self.m}")
        return self

    def check_for(self, p: int) -> "SeriesTruncation":
        """Validate m >= p for multiplicity p."""
        if self.m < p:
            raise InvalidInputError(f"series cutoff m={self.m} must be >= p={p}")
        return self
