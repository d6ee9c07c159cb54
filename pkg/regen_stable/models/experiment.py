"""
Experiment configuration and summary models.

Every experiment kind has a parameter model whose defaults are the desk-scale acceptance
settings, and a tolerances model holding its pass/fail thresholds.
"""
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from regen_stable.models.flow import IntegrandF
from regen_stable.models.stable import SeriesTruncation


class ExperimentKind(str, Enum):
    COVERING_CHECK = "covering_check"
    LOCALTIME_MOMENTS = "localtime_moments"
    JOINT_MOMENTS = "joint_moments"
    SIMULATE_Z = "simulate_z"
    Z_SELFSIM = "z_selfsim"
    FLOW_CONVERGENCE = "flow_convergence"
    CLT_COMPARE = "clt_compare"


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


# Tolerances


class CoveringTolerances(_Strict):
    z_max: float = Field(default=3.0, gt=0, description="Largest accepted |z| per point set")


class LocalTimeTolerances(_Strict):
    first_moment_rel: float = Field(default=0.05, gt=0)
    second_moment_rel: float = Field(default=0.10, gt=0)
    refinement_se: float = Field(default=3.0, gt=0, description="Sample standard errors")
    mittag_leffler_rel: float = Field(default=0.02, gt=0)
    kingman_rel: float = Field(default=0.15, gt=0)
    stationary_z: float = Field(default=3.0, gt=0)


class JointMomentTolerances(_Strict):
    z_max: float = Field(default=3.0, gt=0)
    quadrature_rel_se: float = Field(default=0.01, gt=0)
    psi_z_max: float = Field(default=3.0, gt=0)


class SimulateZTolerances(_Strict):
    z0_abs: float = Field(default=0.0, ge=0)


class SelfSimTolerances(_Strict):
    ks_level: float = Field(default=0.01, gt=0, lt=1)
    c_alpha_rel: float = Field(default=1e-6, gt=0)
    min_paths: int = Field(default=2000, ge=1, description="Below this a power warning is logged")


class FlowTolerances(_Strict):
    final_rel: float = Field(default=0.20, gt=0)
    trend_se: float = Field(default=3.0, ge=0, description="Allowed inversion, in combined SEs")
    renewal_product: float = Field(default=0.15, gt=0)
    strong_ratio: float = Field(default=0.02, gt=0)
    c_n_slope: float = Field(default=0.02, gt=0)


class CltTolerances(_Strict):
    bootstrap_z: float = Field(default=2.0, ge=0)


# Parameter blocks


class CoveringCheckParams(_Strict):
    beta: float = Field(default=0.6, gt=0, lt=1)
    epsilon: float = Field(default=0.05, gt=0)
    horizon: float = Field(default=1.0, gt=0)
    point_sets: List[List[float]] = Field(default_factory=lambda: [[0.5]])
    tolerances: CoveringTolerances = Field(default_factory=CoveringTolerances)

    @field_validator("point_sets")
    @classmethod
    def _points(cls, value):
        for points in value:
            if len(points) not in (1, 2):
                raise ValueError(f"point sets hold one or two points, got {points}")
            if any(x <= 0 for x in points) or len(set(points)) != len(points):
                raise ValueError(f"points must be positive and distinct: {points}")
        return value


class LocalTimeMomentsParams(_Strict):
    beta: float = Field(default=0.75, gt=0, lt=1)
    p: int = Field(default=2, ge=1)
    epsilon: float = Field(default=1e-4, gt=0)
    t: float = Field(default=1.0, gt=0, le=1)
    increments: List[Tuple[float, float]] = Field(
        default_factory=lambda: [(0.0, 0.3), (0.5, 0.8)]
    )
    refine_epsilon: float = Field(default=1e-2, gt=0)
    refine_eta: float = Field(default=1e-3, gt=0)
    refinements: int = Field(default=200, ge=2)
    refine_attempts: int = Field(default=256, ge=1, description="Seeds tried for a nonempty intersection")
    ml_betas: List[float] = Field(default_factory=lambda: [0.5, 0.75])
    ml_paths: int = Field(default=10_000, ge=1)
    kingman_ladder: List[int] = Field(default_factory=lambda: [100, 1000, 10_000])
    kingman_n: int = Field(default=1000, ge=1, description="Ladder rung compared with the ε-estimator")
    tolerances: LocalTimeTolerances = Field(default_factory=LocalTimeTolerances)

    @model_validator(mode="after")
    def _consistent(self):
        if self.refine_eta >= self.refine_epsilon:
            raise ValueError("refine_eta must be smaller than refine_epsilon")
        if any(not 0 <= s <= t <= 1 for s, t in self.increments):
            raise ValueError("increments need 0 <= s <= t <= 1")
        if len(self.increments) != 2:
            raise ValueError("stationarity compares exactly two increment windows")
        if self.kingman_n not in self.kingman_ladder:
            raise ValueError("kingman_n must be one of the ladder rungs")
        return self


class JointMomentsParams(_Strict):
    beta: float = Field(default=0.75, gt=0, lt=1)
    p: int = Field(default=2, ge=1)
    index_sets: List[List[int]] = Field(default_factory=lambda: [[1, 2], [2, 3]])
    times: List[float] = Field(default_factory=lambda: [1.0, 1.0])
    epsilon: float = Field(default=1e-4, gt=0)
    evaluations: int = Field(default=1_000_000, ge=100)
    rel_target: float = Field(default=0.01, gt=0)
    psi_shifts: int = Field(default=2000, ge=2)
    psi_evaluations: int = Field(default=2000, ge=100, description="Budget per sampled shift")
    tolerances: JointMomentTolerances = Field(default_factory=JointMomentTolerances)


class _SeriesParams(_Strict):
    alpha: float = Field(default=0.8, gt=0, lt=2)
    beta: float = Field(default=0.75, gt=0, lt=1)
    p: int = Field(default=2, ge=1)
    m: int = Field(default=12, ge=1)
    n_arrivals: int = Field(default=50, ge=1)
    epsilon: float = Field(default=1e-4, gt=0)

    @property
    def truncation(self) -> SeriesTruncation:
        return SeriesTruncation(m=self.m, n_arrivals=self.n_arrivals)

    @model_validator(mode="after")
    def _truncation(self):
        if self.n_arrivals < self.m or self.m < self.p:
            raise ValueError(f"need n_arrivals >= m >= p, got {self.n_arrivals}, {self.m}, {self.p}")
        return self


class SimulateZParams(_SeriesParams):
    grid_points: int = Field(default=11, ge=2)
    tolerances: SimulateZTolerances = Field(default_factory=SimulateZTolerances)


class SelfSimParams(_SeriesParams):
    c: float = Field(default=2.0, gt=0)
    t0: float = Field(default=0.5, gt=0)
    c_alpha_checks: List[float] = Field(default_factory=lambda: [0.3, 0.8, 1.5])
    tolerances: SelfSimTolerances = Field(default_factory=SelfSimTolerances)

    @model_validator(mode="after")
    def _unit_window(self):
        if self.c * self.t0 > 1 or self.t0 > 1:
            raise ValueError("c * t0 and t0 must lie in (0, 1]")
        return self


class FlowConvergenceParams(_Strict):
    beta: float = Field(default=0.75, gt=0, lt=1)
    p: int = Field(default=2, ge=1)
    alpha: float = Field(default=0.8, gt=0, lt=2)
    t: float = Field(default=1.0, gt=0, le=1)
    n_grid: List[int] = Field(default_factory=lambda: [1000, 3000, 10_000, 30_000])
    integrand: IntegrandF = Field(default_factory=IntegrandF)
    renewal_n: int = Field(default=10_000, ge=2)
    c_n_range: Tuple[int, int] = (1000, 1_000_000)
    tolerances: FlowTolerances = Field(default_factory=FlowTolerances)

    @model_validator(mode="after")
    def _integrand_arity(self):
        if self.integrand.p != self.p:
            raise ValueError(f"integrand arity {self.integrand.p} differs from p={self.p}")
        return self


class CltCompareParams(_SeriesParams):
    n_grid: List[int] = Field(default_factory=lambda: [1000, 10_000, 100_000])
    integrand: IntegrandF = Field(default_factory=IntegrandF)
    n_boot: int = Field(default=200, ge=10)
    tolerances: CltTolerances = Field(default_factory=CltTolerances)


PARAMS_MODELS: Dict[ExperimentKind, type] = {
    ExperimentKind.COVERING_CHECK: CoveringCheckParams,
    ExperimentKind.LOCALTIME_MOMENTS: LocalTimeMomentsParams,
    ExperimentKind.JOINT_MOMENTS: JointMomentsParams,
    ExperimentKind.SIMULATE_Z: SimulateZParams,
    ExperimentKind.Z_SELFSIM: SelfSimParams,
    ExperimentKind.FLOW_CONVERGENCE: FlowConvergenceParams,
    ExperimentKind.CLT_COMPARE: CltCompareParams,
}

DEFAULT_REPLICATIONS: Dict[ExperimentKind, int] = {
    ExperimentKind.COVERING_CHECK: 100_000,
    ExperimentKind.LOCALTIME_MOMENTS: 10_000,
    ExperimentKind.JOINT_MOMENTS: 10_000,
    ExperimentKind.SIMULATE_Z: 100,
    ExperimentKind.Z_SELFSIM: 2000,
    ExperimentKind.FLOW_CONVERGENCE: 10_000,
    ExperimentKind.CLT_COMPARE: 2000,
}


class ModelInfo(_Strict):
    """Parameters echoed by `info`."""

    alpha: float = Field(default=0.8, gt=0, lt=2)
    beta: float = Field(default=0.75, gt=0, lt=1)
    p: int = Field(default=2, ge=1)


class ExperimentConfig(BaseModel):
    """A fully resolved experiment run."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: ExperimentKind
    params: Any = Field(..., description="Instance of PARAMS_MODELS[kind]")
    replications: int = Field(..., ge=1)
    master_seed: int = Field(..., ge=0, lt=2**64)
    output_path: str = "results"
    threads: int = Field(default=1, ge=1)

    @model_validator(mode="before")
    @classmethod
    def _coerce_params(cls, data):
        if isinstance(data, dict):
            kind = ExperimentKind(data.get("kind"))
            params = data.get("params")
            if params is None:
                params = {}
            if isinstance(params, dict):
                data = {**data, "params": PARAMS_MODELS[kind].model_validate(params)}
            if data.get("replications") is None:
                data = {**data, "replications": DEFAULT_REPLICATIONS[kind]}
        return data

    @model_validator(mode="after")
    def _params_type(self):
        if not isinstance(self.params, PARAMS_MODELS[self.kind]):
            raise ValueError(f"params for {self.kind.value} must be {PARAMS_MODELS[self.kind].__name__}")
        return self

    def resolved(self) -> Dict[str, Any]:
        """JSON-ready view of the full configuration."""
        return {
            "kind": self.kind.value,
            "replications": self.replications,
            "master_seed": self.master_seed,
            "output_path": self.output_path,
            "threads": self.threads,
            "params": self.params.model_dump(mode="json"),
        }


class CheckResult(BaseModel):
    """One pass/fail acceptance check."""

    name: str
    statistic: float
    threshold: float
    passed: bool
    detail: Optional[str] = None


class StatSummary(BaseModel):
    """Result of one experiment run."""

    kind: ExperimentKind
    mean: float = 0.0
    std_error: float = Field(default=0.0, ge=0)
    quantiles: List[Tuple[float, float]] = Field(default_factory=list)
    ks_statistic: Optional[float] = None
    n_samples: int = Field(default=0, ge=0)
    checks: List[CheckResult] = Field(default_factory=list)
    warnings: List[str] = Field(default_factory=list)
    knobs: Dict[str, Any] = Field(default_factory=dict)
    versions: Dict[str, str] = Field(default_factory=dict)

    @field_validator("quantiles")
    @classmethod
    def _sorted(cls, value):
        if any(a[0] > b[0] for a, b in zip(value, value[1:])):
            raise ValueError("quantiles must be sorted by level")
        return value

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failing(self) -> List[str]:
        return [check.name for check in self.checks if not check.passed]


class Subcommand(str, Enum):
    COVERING_CHECK = "covering-check"
    LOCALTIME_MOMENTS = "localtime-moments"
    JOINT_MOMENTS = "joint-moments"
    SIMULATE_Z = "simulate-z"
    SELFSIM = "selfsim"
    FLOW_CONVERGENCE = "flow-convergence"
    CLT_COMPARE = "clt-compare"
    INFO = "info"

    @property
    def kind(self) -> Optional[ExperimentKind]:
        return SUBCOMMAND_KINDS.get(self)


SUBCOMMAND_KINDS: Dict[Subcommand, ExperimentKind] = {
    Subcommand.COVERING_CHECK: ExperimentKind.COVERING_CHECK,
    Subcommand.LOCALTIME_MOMENTS: ExperimentKind.LOCALTIME_MOMENTS,
    Subcommand.JOINT_MOMENTS: ExperimentKind.JOINT_MOMENTS,
    Subcommand.SIMULATE_Z: ExperimentKind.SIMULATE_Z,
    Subcommand.SELFSIM: ExperimentKind.Z_SELFSIM,
    Subcommand.FLOW_CONVERGENCE: ExperimentKind.FLOW_CONVERGENCE,
    Subcommand.CLT_COMPARE: ExperimentKind.CLT_COMPARE,
}


class CliInvocation(BaseModel):
    """Parsed command line."""

    subcommand: Subcommand
    config_path: Optional[str] = None
    overrides: List[str] = Field(default_factory=list)
    seed: Optional[int] = Field(default=None, ge=0, lt=2**64)
    out: Optional[str] = None
    threads: Optional[int] = Field(default=None, ge=1)
    log_level: Optional[str] = None
    kind: Optional[ExperimentKind] = None
    dry_run: bool = False
