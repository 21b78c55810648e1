"""Dataset models."""
from typing import Iterator, Literal, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from app.core.exceptions import DomainError

Task = Literal["classification", "regression"]


class Sample(BaseModel):
    """One observation Z = (X, Y)."""
    model_config = ConfigDict(frozen=True)

    x: Tuple[float, ...]
    y: Union[int, float]


class Dataset(BaseModel):
    """Immutable learning set.

    ``x`` has shape (n, d) and ``y`` shape (n,). Classification labels are
    integers drawn from ``labels``; regression labels are reals.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    x: np.ndarray
    y: np.ndarray
    task: Task = "classification"
    labels: Tuple[int, ...] = ()

    @model_validator(mode="before")
    @classmethod
    def normalize_arrays(cls, data):
        if not isinstance(data, dict):
            return data
        data = dict(data)
        x = np.array(data.get("x"), dtype=float)
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        if x.ndim != 2:
            raise DomainError(f"features must be a 2-D array, got shape {x.shape}")
        task = data.get("task", "classification")
        raw_y = np.asarray(data.get("y"))
        if raw_y.ndim != 1 or raw_y.shape[0] != x.shape[0]:
            raise DomainError(f"labels shape {raw_y.shape} does not match {x.shape[0]} samples")
        if x.shape[0] < 1:
            raise DomainError("a dataset needs at least one sample")
        if not np.all(np.isfinite(x)):
            raise DomainError("features contain NaN or Inf")

        if task == "classification":
            y_float = raw_y.astype(float)
            if not np.all(np.isfinite(y_float)) or not np.all(y_float == np.round(y_float)):
                raise DomainError("classification labels must be integers")
            y = y_float.astype(np.int64)
            labels = tuple(int(v) for v in data.get("labels") or ())
            if not labels:
                labels = tuple(int(v) for v in np.unique(y))
            labels = tuple(sorted(set(labels)))
            unknown = set(np.unique(y).tolist()) - set(labels)
            if unknown:
                raise DomainError(f"labels {sorted(unknown)} outside declared label set {labels}")
        else:
            y = raw_y.astype(float)
            if not np.all(np.isfinite(y)):
                raise DomainError("regression labels contain NaN or Inf")
            labels = ()

        x.setflags(write=False)
        y.setflags(write=False)
        data.update(x=x, y=y, task=task, labels=labels)
        return data

    @property
    def n(self) -> int:
        return int(self.x.shape[0])

    @property
    def dim(self) -> int:
        return int(self.x.shape[1])

    @property
    def samples(self) -> Tuple[Sample, ...]:
        return tuple(self.iter_samples())

    def iter_samples(self) -> Iterator[Sample]:
        for row, label in zip(self.x, self.y):
            yield Sample(x=tuple(float(v) for v in row), y=label.item())

    def subset(self, mask: Sequence[int]) -> "Dataset":
        """Subsample selected by a binary mask, keeping the declared label set."""
        selector = np.asarray(mask, dtype=bool)
        if selector.shape != (self.n,):
            raise DomainError(f"mask of length {selector.shape[0]} for a dataset of size {self.n}")
        if not selector.any():
            raise DomainError("mask selects no sample")
        return Dataset(x=self.x[selector], y=self.y[selector], task=self.task, labels=self.labels)

    def require_learning_set(self) -> "Dataset":
        if self.n < 2:
            raise DomainError(f"a learning set needs n >= 2, got {self.n}")
        return self

    @classmethod
    def from_samples(cls, samples: Sequence[Sample], task: Task = "classification",
                     labels: Sequence[int] = ()) -> "Dataset":
        if not samples:
            raise DomainError("empty sample list")
        dims = {len(s.x) for s in samples}
        if len(dims) != 1:
            raise DomainError(f"inconsistent feature dimensions {sorted(dims)}")
        return cls(x=[list(s.x) for s in samples], y=[s.y for s in samples],
                   task=task, labels=tuple(labels))
