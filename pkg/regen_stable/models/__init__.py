"""
Data models for the regen-stable laboratory.
"""
from typing import Type, TypeVar

from pydantic import BaseModel, ValidationError

from regen_stable.errors import InvalidInputError
from regen_stable.models.covering import CoveringConfig, LocalTimeParams
from regen_stable.models.experiment import (
    DEFAULT_REPLICATIONS,
    PARAMS_MODELS,
    CheckResult,
    CliInvocation,
    CltCompareParams,
    CoveringCheckParams,
    ExperimentConfig,
    ExperimentKind,
    FlowConvergenceParams,
    JointMomentsParams,
    LocalTimeMomentsParams,
    ModelInfo,
    SelfSimParams,
    SimulateZParams,
    StatSummary,
    Subcommand,
)
from regen_stable.models.flow import (
    FlowBackend,
    FlowState,
    IntegrandF,
    IntegrandKind,
    RenewalChainModel,
    ThalerMapModel,
)
from regen_stable.models.moments import (
    IntegrationBudget,
    MomentEstimate,
    MomentMethod,
    MomentSpec,
    z_score,
)
from regen_stable.models.stable import LevyModel, LevyVariant, SeriesTruncation

M = TypeVar("M", bound=BaseModel)


def build(model: Type[M], **values) -> M:
    """Construct a model, reporting validation failures as InvalidInputError."""
    try:
        return model(**values)
    except ValidationError as e:
        problems = "; ".join(err["msg"] for err in e.errors())
        raise InvalidInputError(f"invalid {model.__name__}: {problems}") from e


__all__ = [
    "DEFAULT_REPLICATIONS",
    "PARAMS_MODELS",
    "CheckResult",
    "CliInvocation",
    "CltCompareParams",
    "CoveringCheckParams",
    "CoveringConfig",
    "ExperimentConfig",
    "ExperimentKind",
    "FlowBackend",
    "FlowConvergenceParams",
    "FlowState",
    "IntegrandF",
    "IntegrandKind",
    "IntegrationBudget",
    "JointMomentsParams",
    "LevyModel",
    "LevyVariant",
    "LocalTimeMomentsParams",
    "LocalTimeParams",
    "ModelInfo",
    "MomentEstimate",
    "MomentMethod",
    "MomentSpec",
    "RenewalChainModel",
    "SelfSimParams",
    "SeriesTruncation",
    "SimulateZParams",
    "StatSummary",
    "Subcommand",
    "ThalerMapModel",
    "build",
    "z_score",
]
