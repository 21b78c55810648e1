"""Synthetic distributions and experiment reports."""
from typing import Any, Dict, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.exceptions import ConfigurationError

DistributionKind = Literal["threshold-noise", "interval-noise", "gaussian-regression", "constant"]
DeviationKind = Literal["out", "in", "half-out", "maj", "binary-half", "binary-maj", "binary-abs"]


class SyntheticDistribution(BaseModel):
    """A data-generating distribution with X ~ Uniform[0, 1].

    threshold-noise: clean label 2 iff X > theta, flipped with rate ``flip``;
    interval-noise: clean label 2 iff lower < X <= upper, flipped likewise;
    gaussian-regression: Y = X + sigma Z; constant: Y = 1.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: DistributionKind = "threshold-noise"
    theta: float = Field(0.5, ge=0.0, le=1.0)
    flip: float = Field(0.2, ge=0.0, le=1.0)
    lower: float = Field(0.25, ge=0.0, le=1.0)
    upper: float = Field(0.75, ge=0.0, le=1.0)
    sigma: float = Field(0.5, gt=0.0)

    @model_validator(mode="after")
    def check_interval(self):
        if self.kind == "interval-noise" and self.lower >= self.upper:
            raise ConfigurationError(f"interval ({self.lower}, {self.upper}] is empty")
        return self

    @property
    def task(self) -> str:
        return "regression" if self.kind == "gaussian-regression" else "classification"


class CoverageRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    eps: float
    freq: float = Field(..., ge=0.0, le=1.0)
    bound: float
    branch: str
    margin: float
    slack: float
    violation: bool


class CoverageReport(BaseModel):
    """Empirical Pr(deviation >= eps) against a bound, one row per eps.

    ``ghost_slack`` is three ghost-sample standard errors at most; a row is
    a violation only when the frequency of deviations beyond eps plus that
    slack exceeds the bound by more than three binomial standard errors.
    """
    model_config = ConfigDict(frozen=True)

    config: Dict[str, Any]
    replicates: int
    ghost_size: int
    seed: int
    deviation: DeviationKind
    bound_variant: str
    exact_scheme: bool
    mean_deviation: float
    ghost_slack: float
    rows: Tuple[CoverageRow, ...]
    notes: Tuple[str, ...] = ()

    @property
    def violations(self) -> Tuple[CoverageRow, ...]:
        return tuple(row for row in self.rows if row.violation)


class L1Report(BaseModel):
    """Mean of R_tilde - R_CV^Out over replicates against the l1 bounds."""
    model_config = ConfigDict(frozen=True)

    config: Dict[str, Any]
    replicates: int
    ghost_size: int
    seed: int
    mean: float
    standard_error: float
    bound: float
    erm_bound: Optional[float] = None
    holds: bool


class MistakeSummary(BaseModel):
    """Counting quantities of a mistake matrix.

    ``kappa`` counts rows where at least floor((N+1)/2) members err;
    ``best_l_total`` sums the mistakes of the l = floor(N/2)+1 best members.
    """
    model_config = ConfigDict(frozen=True)

    m: int
    members: int
    kappa: int
    total: int
    best_l_total: int
    l: int  # noqa: E741
    e_a: float
    e_b: float
    e_g: float


class OracleVerdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    passed: bool
    max_m: int
    max_n: int
    matrices_checked: int
    counterexample: Optional[Dict[str, Any]] = None
    informational: Optional[Dict[str, Any]] = None
