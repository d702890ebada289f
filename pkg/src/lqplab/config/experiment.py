"""
Experiment configuration schema.

An experiment is one JSON document whose ``kind`` selects the suite. Unknown
keys are rejected, tolerances must be positive and exponents are given as
numbers or strings such as ``"4/3"`` and ``"inf"``.
"""

import json
import logging
import math
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import (
    AfterValidator,
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeInt,
    PositiveFloat,
    PositiveInt,
    TypeAdapter,
    ValidationError,
    field_validator,
    model_validator,
)

from lqplab.errors import ConfigError, PreconditionError
from lqplab.geometry import ChartDomain
from lqplab.geometry.exponents import reciprocal

logger = logging.getLogger(__name__)


def _check_exponent(value: Union[float, str]) -> Union[float, str]:
    try:
        inv = reciprocal(value)
    except (PreconditionError, ValueError, ZeroDivisionError) as e:
        raise ValueError(f"invalid exponent {value!r}: {e}") from e
    if not 0 <= inv <= 1:
        raise ValueError(f"exponent {value!r} must lie in [1, inf]")
    return value


Exponent = Annotated[Union[float, str], AfterValidator(_check_exponent)]


def exponent_value(value: Union[float, str]) -> float:
    """Float value of a validated exponent (``inf`` for infinity)."""
    inv = reciprocal(value)
    return math.inf if inv == 0 else float(1 / inv)


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class OutputSpec(StrictModel):
    """Where the report goes; the directory defaults to ``LQPLAB_OUTPUT_DIR``."""

    directory: Optional[Path] = None
    basename: Optional[str] = Field(
        default=None,
        description="File stem of the report (default: the experiment name)",
    )
    csv: bool = Field(
        default=True, description="Write CSV ladders next to the JSON report"
    )


class DomainSpec(StrictModel):
    """A model domain: circle, torus, ball, interval, box or truncated half-plane."""

    kind: Literal["circle", "torus", "ball", "interval", "box", "halfplane"]
    length: PositiveFloat = 2 * math.pi
    lengths: Optional[List[PositiveFloat]] = None
    dim: PositiveInt = 2
    radius: PositiveFloat = 1.0
    bounds: Optional[List[Tuple[float, float]]] = None
    y_extent: PositiveFloat = 4.0
    z_min: float = -1.0
    z_max: float = 4.0

    @model_validator(mode="after")
    def check_parameters(self):
        if self.kind in ("interval", "box"):
            if not self.bounds:
                raise ValueError(f"{self.kind} domains need 'bounds'")
            if self.kind == "interval" and len(self.bounds) != 1:
                raise ValueError("interval domains take exactly one pair of bounds")
            if any(lo >= hi for lo, hi in self.bounds):
                raise ValueError("every bound pair must be increasing")
        if self.kind == "halfplane" and not self.z_min <= 0 < self.z_max:
            raise ValueError("half-plane truncation needs z_min <= 0 < z_max")
        return self

    def build(self) -> ChartDomain:
        if self.kind == "circle":
            return ChartDomain.circle(self.length)
        if self.kind == "torus":
            return ChartDomain.torus(self.lengths or [2 * math.pi] * self.dim)
        if self.kind == "ball":
            return ChartDomain.ball(self.dim, self.radius)
        if self.kind == "interval":
            lo, hi = self.bounds[0]  # type: ignore[index]
            return ChartDomain.interval(lo, hi)
        if self.kind == "box":
            return ChartDomain.box(self.bounds)  # type: ignore[arg-type]
        return ChartDomain.halfplane(self.y_extent, self.z_min, self.z_max)


class FormSpec(StrictModel):
    """Symbolic form: one sympy expression per multi-index, in lexicographic order."""

    degree: NonNegativeInt
    components: List[str] = Field(min_length=1)
    label: str = ""


class ExperimentBase(StrictModel):
    name: str = Field(min_length=1)
    description: str = ""
    seed: NonNegativeInt = 0
    record_timing: bool = False
    output: OutputSpec = OutputSpec()


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


class FamilySpec(StrictModel):
    max_degree: PositiveInt = 3
    phases: List[Literal["sin", "cos"]] = ["sin", "cos"]


class SolvabilitySample(StrictModel):
    form: FormSpec
    expect: Literal["solvable", "obstructed"] = "solvable"


class HolderSpec(StrictModel):
    q_small: Exponent
    q_large: Exponent


class SobolevTolerances(StrictModel):
    consistency: PositiveFloat = 1e-3
    stabilization: PositiveFloat = 0.05


class SobolevVerifyConfig(ExperimentBase):
    kind: Literal["sobolev-verify"]
    domain: DomainSpec
    degree: NonNegativeInt = 0
    p: Exponent = 2
    q: Exponent = 2
    resolutions: List[PositiveInt] = Field(default=[32, 64, 128], min_length=1)
    family: FamilySpec = FamilySpec()
    with_solvability: bool = False
    samples: List[SolvabilitySample] = []
    holder: Optional[HolderSpec] = None
    tolerances: SobolevTolerances = SobolevTolerances()


class BallWitnessExperiment(ExperimentBase):
    kind: Literal["ball-witness"]
    n: PositiveInt = 2
    k: NonNegativeInt = 1
    p: Exponent
    q: Exponent
    mu: Optional[float] = None
    t_ladder: List[PositiveFloat] = Field(default=[1e-2, 1e-3, 1e-4], min_length=2)
    ramp: PositiveFloat = 1e-3
    radial_nodes: PositiveInt = 32
    angular_nodes: PositiveInt = 64


class HyperbolicWitnessExperiment(ExperimentBase):
    kind: Literal["hyperbolic-witness"]
    exponents: List[PositiveFloat] = Field(default=[1.5, 2.0, 4.0], min_length=1)
    pairs: List[Tuple[Exponent, Exponent]] = [(2, 2)]
    nodes_per_unit: PositiveInt = 64
    z_max: PositiveFloat = 4.0

    @field_validator("exponents")
    @classmethod
    def exponents_above_one(cls, v):
        if any(r <= 1 for r in v):
            raise ValueError("sampled exponents must exceed 1")
        return v


class PlateauSpec(StrictModel):
    a_values: List[PositiveFloat] = Field(default=[2.0, 4.0, 8.0, 16.0], min_length=1)
    p: Exponent = 2
    q: Exponent = 2


class GaussianSpec(StrictModel):
    kappas: List[PositiveFloat] = Field(default=[1.0, 0.1, 0.01, 0.001], min_length=2)
    p: Exponent = 2
    slope_tolerance: PositiveFloat = 0.02


class ReducedSpec(StrictModel):
    omega: str = "exp(-x**2)"
    m_values: List[PositiveFloat] = Field(default=[1.0, 2.0, 4.0, 8.0], min_length=1)
    p: Exponent = 2


class LineWitnessExperiment(ExperimentBase):
    kind: Literal["line-witness"]
    plateau: Optional[PlateauSpec] = PlateauSpec()
    gaussian: Optional[GaussianSpec] = GaussianSpec()
    reduced: Optional[ReducedSpec] = ReducedSpec()


class BaseSpec(StrictModel):
    """Base set of the averaged homotopy: a point or a symmetric ring."""

    kind: Literal["point", "symmetric"] = "symmetric"
    point: Optional[List[float]] = None
    radius: PositiveFloat = 0.25
    count: PositiveInt = 4


class PoincareTolerances(StrictModel):
    residual: PositiveFloat = 1e-6
    closed: PositiveFloat = 1e-8


class PoincareExperiment(ExperimentBase):
    kind: Literal["poincare"]
    domain: DomainSpec = DomainSpec(kind="ball")
    form: FormSpec
    p: Exponent = 2
    q: Exponent = 2
    resolution: Tuple[PositiveInt, PositiveInt] = (24, 48)
    base: BaseSpec = BaseSpec()
    radial_order: PositiveInt = 32
    random_forms: NonNegativeInt = 0
    max_power: PositiveInt = 3
    tolerances: PoincareTolerances = PoincareTolerances()


class SmoothTolerances(StrictModel):
    homotopy_residual: PositiveFloat = 1e-6
    outside: PositiveFloat = 1e-12
    continuity: PositiveFloat = 1e-2
    norm_ratio: PositiveFloat = 1e-3


class SmoothExperiment(ExperimentBase):
    kind: Literal["smooth"]
    form: FormSpec
    chart: DomainSpec = DomainSpec(kind="box", bounds=[(-1.5, 1.5), (-1.5, 1.5)])
    center: List[float] = [0.0, 0.0]
    radius: PositiveFloat = 1.0
    epsilons: List[PositiveFloat] = Field(default=[0.2, 0.1, 0.05], min_length=1)
    probe_epsilon: PositiveFloat = 0.02
    p: Exponent = 2
    q: Exponent = 2
    resolution: PositiveInt = 24
    mollifier_nodes: PositiveInt = 21
    probe_points: PositiveInt = 16
    tolerances: SmoothTolerances = SmoothTolerances()

    @model_validator(mode="after")
    def check_chart(self):
        if self.chart.kind != "box":
            raise ValueError("regularization charts are boxes")
        if len(self.center) != len(self.chart.bounds or []):
            raise ValueError("deformation centre and chart dimensions differ")
        return self


class SolverSpec(StrictModel):
    method: Literal["lagged-diffusivity", "gradient"] = "lagged-diffusivity"
    rtol: PositiveFloat = 1e-9
    max_iterations: PositiveInt = 200
    anneal: PositiveFloat = 1e-2

    @field_validator("anneal")
    @classmethod
    def anneal_at_most_one(cls, v):
        if v > 1:
            raise ValueError("anneal factor must not exceed 1")
        return v


class PdeTolerances(StrictModel):
    reference: PositiveFloat = 1e-4
    gradient: PositiveFloat = 1e-5
    gauge: PositiveFloat = 1e-10
    green: PositiveFloat = 1e-8


class PdeSolveExperiment(ExperimentBase):
    kind: Literal["pde-solve"]
    domain: DomainSpec
    source: FormSpec
    p: Exponent
    q: Optional[Exponent] = None
    resolution: PositiveInt = 256
    solver: SolverSpec = SolverSpec()
    expect: Literal["solved", "incompatible"] = "solved"
    reference: Optional[FormSpec] = Field(
        default=None,
        description="Manufactured solution compared through its differential",
    )
    tolerances: PdeTolerances = PdeTolerances()

    @model_validator(mode="after")
    def check_reference(self):
        if self.reference is not None and self.reference.degree != self.source.degree:
            raise ValueError("reference solution and source must have the same degree")
        return self


class HodgeTolerances(StrictModel):
    identity: PositiveFloat = 1e-10
    decomposition: PositiveFloat = 1e-10


class HodgeExperiment(ExperimentBase):
    kind: Literal["hodge"]
    domain: DomainSpec
    resolution: PositiveInt = 16
    degrees: Optional[List[NonNegativeInt]] = None
    samples: PositiveInt = 10
    form: Optional[FormSpec] = None
    image_identity: bool = True
    tolerances: HodgeTolerances = HodgeTolerances()


class DiscretizedSource(StrictModel):
    domain: DomainSpec
    resolution: PositiveInt = 8


class RandomSource(StrictModel):
    dims: List[PositiveInt] = Field(min_length=2)
    ranks: Optional[List[NonNegativeInt]] = None


class ComplexTolerances(StrictModel):
    certificate: PositiveFloat = 1e-6


class ComplexAnalyzeExperiment(ExperimentBase):
    kind: Literal["complex-analyze"]
    path: Optional[Path] = None
    discretized: Optional[DiscretizedSource] = None
    random: Optional[RandomSource] = None
    levels: Optional[List[PositiveInt]] = None
    p: Exponent = 2
    q: Exponent = 2
    q_large: Optional[Exponent] = None
    expected_cohomology: Dict[int, NonNegativeInt] = {}
    tolerances: ComplexTolerances = ComplexTolerances()

    @model_validator(mode="after")
    def one_source(self):
        given = [s for s in (self.path, self.discretized, self.random) if s is not None]
        if len(given) != 1:
            raise ValueError("give exactly one of 'path', 'discretized' or 'random'")
        return self


ExperimentConfig = Annotated[
    Union[
        SobolevVerifyConfig,
        BallWitnessExperiment,
        HyperbolicWitnessExperiment,
        LineWitnessExperiment,
        PoincareExperiment,
        SmoothExperiment,
        PdeSolveExperiment,
        HodgeExperiment,
        ComplexAnalyzeExperiment,
    ],
    Field(discriminator="kind"),
]

_ADAPTER: TypeAdapter = TypeAdapter(ExperimentConfig)


def parse_experiment(data: Dict[str, Any]) -> Any:
    """Validate a decoded JSON document.

    Raises:
        ConfigError: With the pydantic error summary.
    """
    try:
        return _ADAPTER.validate_python(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid experiment configuration:\n{e}") from e


def load_experiment(path: Union[str, Path]) -> Any:
    """Read and validate an experiment file.

    Raises:
        ConfigError: If the file is missing, is not JSON or fails validation.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ConfigError(f"Experiment file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Experiment file {path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"Experiment file {path} must hold a JSON object")
    config = parse_experiment(data)
    logger.debug("Loaded %s experiment '%s' from %s", config.kind, config.name, path)
    return config


__all__ = [
    "BallWitnessExperiment",
    "ComplexAnalyzeExperiment",
    "DomainSpec",
    "ExperimentConfig",
    "FormSpec",
    "HodgeExperiment",
    "HyperbolicWitnessExperiment",
    "LineWitnessExperiment",
    "OutputSpec",
    "PdeSolveExperiment",
    "PoincareExperiment",
    "SmoothExperiment",
    "SobolevVerifyConfig",
    "exponent_value",
    "load_experiment",
    "parse_experiment",
]
