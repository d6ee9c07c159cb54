"""
Covering-scheme and local-time parameter models.
"""
from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator


class CoveringConfig(BaseModel):
    """Parameters of the Poisson covering scheme at resolution epsilon."""

    model_config = ConfigDict(frozen=True)

    beta: float = Field(..., gt=0, lt=1, description="Stability index of each regenerative set")
    epsilon: float = Field(..., gt=0, description="Smallest covering length kept")
    horizon: float = Field(default=1.0, gt=0, description="Window length")


class LocalTimeParams(BaseModel):
    """Index parameters of a p-fold intersection: beta_p = p*beta - p + 1."""

    model_config = ConfigDict(frozen=True)

    beta: float = Field(..., gt=0, lt=1)
    p: int = Field(..., ge=1)

    @computed_field
    @property
    def beta_p(self) -> float:
        return self.p * self.beta - self.p + 1

    @model_validator(mode="after")
    def _feasible(self):
        if not 0 < self.beta_p < 1:
            raise ValueError(
                f"beta_p = {self.beta_p:.6g} must lie in (0,1); need beta in (1 - 1/p, 1)"
            )
        return self
