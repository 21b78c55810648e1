"""Cross-validation scheme models."""
import math
from typing import Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.constants import DEFAULT_DRAWS, ENUMERATION_CAP, WEIGHT_TOLERANCE
from app.core.exceptions import ConfigurationError, DomainError

SchemeKind = Literal["kfold", "loo", "lpo", "holdout", "mc"]


class TrainingVector(BaseModel):
    """Binary mask selecting the training subsample (1 = in training set)."""
    model_config = ConfigDict(frozen=True)

    mask: Tuple[int, ...]

    @model_validator(mode="after")
    def check_mask(self):
        if any(bit not in (0, 1) for bit in self.mask):
            raise DomainError(f"mask entries must be 0 or 1, got {self.mask}")
        ones = sum(self.mask)
        if ones == 0 or ones == len(self.mask):
            raise DomainError("training and test vectors must both select at least one sample")
        return self

    @property
    def n(self) -> int:
        return len(self.mask)

    @property
    def train_size(self) -> int:
        return sum(self.mask)

    @property
    def test_size(self) -> int:
        return self.n - self.train_size

    def as_array(self) -> np.ndarray:
        return np.asarray(self.mask, dtype=bool)

    def __lt__(self, other: "TrainingVector") -> bool:
        return self.mask < other.mask


class CvScheme(BaseModel):
    """A distribution Q over training vectors of length ``n``.

    ``p`` is always the test fraction: training size n(1 - p), test size np.
    """
    model_config = ConfigDict(frozen=True)

    kind: SchemeKind
    n: int = Field(..., ge=2)
    k: Optional[int] = Field(None, ge=2)
    v: Optional[int] = Field(None, ge=1)
    p: Optional[float] = Field(None, gt=0.0, lt=1.0)
    draws: Optional[int] = Field(None, ge=1)
    seed: int = 0
    max_enum: int = Field(ENUMERATION_CAP, ge=1)

    @model_validator(mode="after")
    def check_scheme(self):
        if self.kind == "kfold":
            if self.k is None:
                raise ConfigurationError("k-fold scheme needs k")
            if self.k > self.n or self.n % self.k != 0:
                raise ConfigurationError(f"k={self.k} does not divide n={self.n}")
        elif self.kind == "lpo":
            if self.v is None or not 1 <= self.v <= self.n - 1:
                raise ConfigurationError(f"leave-v-out needs 1 <= v <= n-1, got v={self.v}")
        elif self.kind in ("holdout", "mc"):
            if self.p is None:
                raise ConfigurationError(f"{self.kind} scheme needs a test fraction p")
            test_size = self.n * self.p
            if abs(test_size - round(test_size)) > 1e-9 or not 1 <= round(test_size) <= self.n - 1:
                raise ConfigurationError(f"np must be an integer in [1, n-1], got n*p={test_size}")
            if self.kind == "mc" and self.draws is None:
                raise ConfigurationError("monte-carlo scheme needs a number of draws")
        return self

    @property
    def test_size(self) -> int:
        if self.kind == "kfold":
            return self.n // self.k
        if self.kind == "loo":
            return 1
        if self.kind == "lpo":
            return self.v
        return int(round(self.n * self.p))

    @property
    def test_fraction(self) -> float:
        if self.kind == "kfold":
            return 1.0 / self.k
        if self.kind in ("holdout", "mc"):
            return self.p
        return self.test_size / self.n

    @property
    def support_size(self) -> int:
        """Number of distinct training vectors Q can put mass on."""
        if self.kind == "kfold":
            return self.k
        if self.kind == "holdout":
            return 1
        return math.comb(self.n, self.test_size)

    @classmethod
    def leave_out(cls, n: int, v: int, seed: int = 0, max_enum: int = ENUMERATION_CAP,
                  draws: Optional[int] = DEFAULT_DRAWS) -> "CvScheme":
        if v == 1:
            return cls(kind="loo", n=n, seed=seed, max_enum=max_enum, draws=draws)
        return cls(kind="lpo", n=n, v=v, seed=seed, max_enum=max_enum, draws=draws)


class WeightedVectorSet(BaseModel):
    """Training vectors with probability weights, sorted by mask.

    ``exact`` is true when the entries are the whole support of Q.
    """
    model_config = ConfigDict(frozen=True)

    vectors: Tuple[TrainingVector, ...]
    weights: Tuple[float, ...]
    exact: bool

    @model_validator(mode="after")
    def check_weights(self):
        if not self.vectors:
            raise ConfigurationError("empty training-vector set")
        if len(self.vectors) != len(self.weights):
            raise ConfigurationError("one weight per training vector is required")
        if any(w <= 0 for w in self.weights):
            raise ConfigurationError("weights must be positive")
        if abs(math.fsum(self.weights) - 1.0) > WEIGHT_TOLERANCE:
            raise ConfigurationError(f"weights sum to {math.fsum(self.weights)}, not 1")
        sizes = {v.train_size for v in self.vectors}
        lengths = {v.n for v in self.vectors}
        if len(sizes) != 1 or len(lengths) != 1:
            raise ConfigurationError("all training vectors must share length and training size")
        return self

    @property
    def entries(self) -> Tuple[Tuple[TrainingVector, float], ...]:
        return tuple(zip(self.vectors, self.weights))

    @property
    def n(self) -> int:
        return self.vectors[0].n

    @property
    def is_uniform(self) -> bool:
        first = self.weights[0]
        return all(abs(w - first) <= WEIGHT_TOLERANCE for w in self.weights)

    def __len__(self) -> int:
        return len(self.vectors)
