"""Hypothesis classes and fitted predictors."""
from typing import Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from typing_extensions import Annotated

from app.core.exceptions import DomainError

ClassKind = Literal["stump", "interval", "histogram"]


class HypothesisClass(BaseModel):
    """A finite-VC class of binary classifiers acting on one feature.

    stump: threshold and direction (one-directional half-lines when
    ``two_sided`` is false); interval: positive label inside (lower, upper];
    histogram: ``bins`` equal cells over [low, high], one label per cell.
    """
    model_config = ConfigDict(frozen=True)

    kind: ClassKind = "stump"
    feature: int = Field(0, ge=0)
    two_sided: bool = True
    bins: int = Field(4, ge=1)
    low: float = 0.0
    high: float = 1.0

    @property
    def declared_vc(self) -> int:
        if self.kind == "stump":
            return 2 if self.two_sided else 1
        if self.kind == "interval":
            return 2
        return self.bins


class _PredictorBase(BaseModel):
    model_config = ConfigDict(frozen=True)

    labels: Tuple[int, ...]

    def _column(self, x: np.ndarray, feature: int) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if feature >= x.shape[1]:
            raise DomainError(f"feature {feature} missing from {x.shape[1]}-dimensional input")
        return x[:, feature]

    def _binary(self, positive: np.ndarray) -> np.ndarray:
        negative_label, positive_label = self.labels[0], self.labels[-1]
        return np.where(positive, positive_label, negative_label)

    def decision_function(self, x) -> np.ndarray:
        """+1 where the second binary label is predicted, -1 elsewhere."""
        if len(self.labels) > 2:
            raise DomainError("scores are only defined for binary label sets")
        return np.where(self.predict(x) == self.labels[-1], 1.0, -1.0)

    def predict(self, x) -> np.ndarray:
        raise NotImplementedError


class StumpPredictor(_PredictorBase):
    kind: Literal["stump"] = "stump"
    feature: int = 0
    direction: int = 1
    threshold: float = 0.0

    def predict(self, x) -> np.ndarray:
        column = self._column(x, self.feature)
        positive = column > self.threshold if self.direction > 0 else column <= self.threshold
        return self._binary(positive)


class IntervalPredictor(_PredictorBase):
    kind: Literal["interval"] = "interval"
    feature: int = 0
    lower: float = float("-inf")
    upper: float = float("-inf")

    def predict(self, x) -> np.ndarray:
        column = self._column(x, self.feature)
        return self._binary((column > self.lower) & (column <= self.upper))


class HistogramPredictor(_PredictorBase):
    kind: Literal["histogram"] = "histogram"
    feature: int = 0
    low: float = 0.0
    high: float = 1.0
    cell_labels: Tuple[int, ...]

    def cells(self, x) -> np.ndarray:
        return histogram_cells(self._column(x, self.feature), self.low, self.high,
                               len(self.cell_labels))

    def predict(self, x) -> np.ndarray:
        return np.asarray(self.cell_labels)[self.cells(x)]


class KnnPredictor(_PredictorBase):
    """k nearest neighbours over a canonically sorted training set."""
    kind: Literal["knn"] = "knn"
    k: int
    task: Literal["classification", "regression"] = "classification"
    train_x: Tuple[Tuple[float, ...], ...]
    train_y: Tuple[float, ...]

    def _neighbours(self, x) -> np.ndarray:
        queries = np.atleast_2d(np.asarray(x, dtype=float))
        train = np.asarray(self.train_x, dtype=float)
        if queries.shape[1] != train.shape[1]:
            raise DomainError(f"query dimension {queries.shape[1]} != training dimension "
                              f"{train.shape[1]}")
        chunks = []
        for start in range(0, queries.shape[0], 2048):
            block = queries[start:start + 2048]
            distances = ((block[:, None, :] - train[None, :, :]) ** 2).sum(axis=2)
            # Stable sort: equal distances resolve to the smaller canonical index
            chunks.append(np.argsort(distances, axis=1, kind="stable")[:, :self.k])
        return np.concatenate(chunks, axis=0)

    def _votes(self, x) -> np.ndarray:
        neighbour_labels = np.asarray(self.train_y)[self._neighbours(x)]
        return np.stack([(neighbour_labels == label).sum(axis=1) for label in self.labels], axis=1)

    def predict(self, x) -> np.ndarray:
        if self.task == "regression":
            return np.asarray(self.train_y, dtype=float)[self._neighbours(x)].mean(axis=1)
        # argmax returns the first maximum, i.e. the smallest label
        return np.asarray(self.labels)[np.argmax(self._votes(x), axis=1)]

    def decision_function(self, x) -> np.ndarray:
        if self.task == "regression":
            return self.predict(x)
        if len(self.labels) > 2:
            raise DomainError("scores are only defined for binary label sets")
        votes = self._votes(x)
        return 2.0 * votes[:, -1] / self.k - 1.0


def histogram_cells(column: np.ndarray, low: float, high: float, bins: int) -> np.ndarray:
    """Cell index of each value; values outside [low, high] fall in the edge cells."""
    if high <= low:
        raise DomainError(f"histogram range [{low}, {high}] is empty")
    scaled = np.floor((np.asarray(column, dtype=float) - low) / (high - low) * bins)
    return np.clip(scaled, 0, bins - 1).astype(np.int64)


Predictor = Annotated[
    Union[StumpPredictor, IntervalPredictor, HistogramPredictor, KnnPredictor],
    Field(discriminator="kind"),
]
