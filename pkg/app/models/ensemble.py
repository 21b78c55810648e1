"""Subagged ensembles and cross-validated risk estimates."""
import math
from typing import Any, Dict, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.constants import WEIGHT_TOLERANCE
from app.core.exceptions import ConfigurationError
from app.models.cv import CvScheme, TrainingVector, WeightedVectorSet
from app.models.dataset import Task
from app.models.learner import Predictor

Aggregation = Literal["average", "majority"]
EstimateVariant = Literal["out", "in", "maj"]


class EnsembleMember(BaseModel):
    model_config = ConfigDict(frozen=True)

    mask: Tuple[int, ...]
    weight: float = Field(..., gt=0.0)
    predictor: Predictor


class SubaggedEnsemble(BaseModel):
    """Predictors fitted on the training subsamples of a CV scheme.

    Members are kept in mask order so every reduction over them runs in
    the same order regardless of how they were fitted.
    """
    model_config = ConfigDict(frozen=True)

    members: Tuple[EnsembleMember, ...]
    aggregation: Aggregation = "average"
    task: Task = "classification"
    labels: Tuple[int, ...] = ()
    exact: bool = True
    scheme: Optional[CvScheme] = None
    learner: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_members(self):
        if not self.members:
            raise ConfigurationError("an ensemble needs at least one member")
        total = math.fsum(m.weight for m in self.members)
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise ConfigurationError(f"member weights sum to {total}, not 1")
        if self.aggregation == "majority" and self.task != "classification":
            raise ConfigurationError("majority aggregation needs a classification task")
        return self

    @property
    def weights(self) -> np.ndarray:
        return np.array([m.weight for m in self.members])

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def vector_set(self) -> WeightedVectorSet:
        return WeightedVectorSet(
            vectors=tuple(TrainingVector(mask=m.mask) for m in self.members),
            weights=tuple(m.weight for m in self.members),
            exact=self.exact,
        )


class CvEstimate(BaseModel):
    """One cross-validated subagged risk estimate."""
    model_config = ConfigDict(frozen=True)

    variant: EstimateVariant
    value: float = Field(..., ge=0.0, le=1.0)
    exact: bool
    per_member_errors: Tuple[float, ...] = ()
    l: Optional[int] = None  # noqa: E741

    def to_record(self, include_members: bool = True) -> Dict[str, Any]:
        record: Dict[str, Any] = {"variant": self.variant, "value": self.value,
                                  "exact": self.exact}
        if self.l is not None:
            record["l"] = self.l
        if include_members:
            record["per_member_errors"] = list(self.per_member_errors)
        return record


class RiskEstimate(BaseModel):
    """Ghost-sample estimate of the generalization error with its standard error."""
    model_config = ConfigDict(frozen=True)

    value: float
    standard_error: float
    m: int


class MistakeMatrix(BaseModel):
    """Binary matrix: entry (i, j) is 1 when member j errs on ghost point i."""
    model_config = ConfigDict(frozen=True)

    entries: Tuple[Tuple[int, ...], ...]

    @model_validator(mode="after")
    def check_entries(self):
        if not self.entries or not self.entries[0]:
            raise ConfigurationError("a mistake matrix needs at least one row and one column")
        width = len(self.entries[0])
        if any(len(row) != width for row in self.entries):
            raise ConfigurationError("mistake matrix rows must have equal length")
        if any(v not in (0, 1) for row in self.entries for v in row):
            raise ConfigurationError("mistake matrix entries must be 0 or 1")
        return self

    @property
    def m(self) -> int:
        return len(self.entries)

    @property
    def members(self) -> int:
        return len(self.entries[0])

    def as_array(self) -> np.ndarray:
        return np.asarray(self.entries, dtype=np.int64)
