"""Run configuration: one validated document per CLI invocation."""
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.constants import (
    DEFAULT_DRAWS,
    DEFAULT_GHOST_SIZE,
    DEFAULT_REPLICATES,
    ENUMERATION_CAP,
    ORACLE_MAX_M,
    ORACLE_MAX_N,
    VC_SEARCH_CAP,
)
from app.core.exceptions import ConfigurationError
from app.models.bounds import BoundVariant
from app.models.dataset import Task
from app.models.simulation import DeviationKind, SyntheticDistribution

Command = Literal[
    "bounds",
    "estimate",
    "subag-train",
    "subag-predict",
    "select-split",
    "simulate",
    "oracle-majority",
    "shatter",
    "schema",
    "generate",
]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class LearnerConfig(_Section):
    learner: Literal["erm", "knn"] = "erm"
    hypothesis_class: Literal["stump", "interval", "histogram"] = Field("stump", alias="class")
    objective: Literal["zero-one", "hinge", "exponential", "logit"] = "zero-one"
    k: int = Field(1, ge=1, description="Neighbours for knn")
    feature: int = Field(0, ge=0)
    two_sided: bool = True
    bins: int = Field(4, ge=1)
    low: float = 0.0
    high: float = 1.0
    clamp: bool = Field(True, description="Clamp surrogate costs into [0, 1]")

    model_config = ConfigDict(json_schema_extra={
        "examples": [
            {"learner": "erm", "class": "stump", "objective": "zero-one"},
            {"learner": "erm", "class": "stump", "objective": "hinge"},
            {"learner": "knn", "k": 3},
        ]
    })


class SchemeConfig(_Section):
    kind: Literal["kfold", "loo", "lpo", "holdout", "mc"] = "kfold"
    k: Optional[int] = Field(None, ge=2, description="Number of folds")
    v: Optional[int] = Field(None, ge=1, description="Test size for leave-v-out")
    p: Optional[float] = Field(None, gt=0.0, lt=1.0, description="Test fraction")
    draws: Optional[int] = Field(DEFAULT_DRAWS, ge=1)
    max_enum: int = Field(ENUMERATION_CAP, ge=1)


class DatasetConfig(_Section):
    path: Optional[str] = None
    task: Task = "classification"
    labels: Optional[List[int]] = None
    synthetic: Optional[SyntheticDistribution] = None
    n: Optional[int] = Field(None, ge=1, description="Sample size for synthetic data")

    @model_validator(mode="after")
    def check_source(self):
        if (self.path is None) == (self.synthetic is None):
            raise ConfigurationError("a dataset needs exactly one of 'path' and 'synthetic'")
        if self.synthetic is not None and self.n is None:
            raise ConfigurationError("synthetic datasets need 'n'")
        return self


class BoundConfig(_Section):
    variant: BoundVariant
    n: int = Field(..., ge=1)
    p: Optional[float] = Field(None, gt=0.0, lt=1.0)
    eps: Union[float, str] = Field(0.0, description="Scalar, comma list or start:stop:step")
    vc: Optional[int] = Field(None, ge=1)
    k: Optional[int] = Field(None, ge=2)
    lam: Optional[float] = Field(None, ge=0.0, alias="lambda")
    delta: Optional[float] = Field(None, ge=0.0, le=1.0)
    alpha: Optional[float] = Field(None, gt=0.0)
    l: Optional[int] = Field(None, ge=1)  # noqa: E741
    b: Optional[float] = Field(None, ge=0.0)
    c: Optional[float] = Field(None, ge=0.0)


class EstimateConfig(_Section):
    variants: List[Literal["out", "in", "maj"]] = ["out", "in"]
    loss: Literal["zero-one", "clipped-absolute", "clipped-squared"] = "zero-one"


class SelectionConfig(_Section):
    eta: float = Field(..., gt=0.0)
    vc: int = Field(..., ge=1)
    variant: Literal["erm", "sym"] = "erm"


class SimulationConfig(_Section):
    experiment: Literal["coverage", "l1"] = "coverage"
    distribution: SyntheticDistribution = SyntheticDistribution()
    n: int = Field(60, ge=2)
    eps: Union[float, str] = "0.05:0.5:0.05"
    replicates: int = Field(DEFAULT_REPLICATES, ge=1)
    ghost_size: int = Field(DEFAULT_GHOST_SIZE, ge=1)
    bound_variant: BoundVariant = "sym"
    deviation: Optional[DeviationKind] = None
    vc: Optional[int] = Field(None, ge=1)
    bound_params: Dict[str, Any] = Field(default_factory=dict)


class ShatterConfig(_Section):
    hypothesis_class: Literal["stump", "interval", "histogram"] = Field("stump", alias="class")
    two_sided: bool = True
    bins: int = Field(4, ge=1)
    low: float = 0.0
    high: float = 1.0
    points: Optional[List[float]] = None
    m: Optional[int] = Field(None, ge=1, description="Maximize over m-point configurations")
    max_n: int = Field(VC_SEARCH_CAP, ge=1, description="VC search depth")


class OracleConfig(_Section):
    max_m: int = Field(ORACLE_MAX_M, ge=1)
    max_n: int = Field(ORACLE_MAX_N, ge=1)


class RunConfig(_Section):
    """Everything a command needs; unknown keys are rejected."""

    command: Command
    seed: int = Field(0, ge=0)
    threads: int = Field(1, ge=1)
    output: Optional[str] = None
    format: Literal["csv", "json"] = "csv"
    check: bool = False
    quiet: bool = False
    dataset: Optional[DatasetConfig] = None
    learner: Optional[LearnerConfig] = None
    scheme: Optional[SchemeConfig] = None
    aggregation: Literal["average", "majority"] = "average"
    bounds: Optional[BoundConfig] = None
    estimate: EstimateConfig = EstimateConfig()
    selection: Optional[SelectionConfig] = None
    simulation: Optional[SimulationConfig] = None
    shatter: Optional[ShatterConfig] = None
    oracle: OracleConfig = OracleConfig()
    ensemble: Optional[str] = Field(None, description="Ensemble JSON for subag-predict")
    queries: Optional[str] = Field(None, description="Feature CSV for subag-predict")

    @model_validator(mode="after")
    def check_sections(self):
        needed = {
            "bounds": ("bounds",),
            "estimate": ("dataset", "learner", "scheme"),
            "subag-train": ("dataset", "learner", "scheme"),
            "subag-predict": ("ensemble", "queries"),
            "select-split": ("dataset", "learner", "selection"),
            "simulate": ("simulation", "learner", "scheme"),
            "shatter": ("shatter",),
            "generate": ("dataset",),
        }.get(self.command, ())
        missing = [name for name in needed if getattr(self, name) is None]
        if missing:
            raise ConfigurationError(f"command {self.command!r} needs {', '.join(missing)}")
        return self

    def echo(self) -> Dict[str, Any]:
        """The configuration as written into artifacts; run-local knobs are left out."""
        return self.model_dump(mode="json", by_alias=True, exclude_none=True,
                               exclude={"output", "threads", "quiet", "format"})
