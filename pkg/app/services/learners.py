"""Deterministic learners: ERM over finite-VC classes and k nearest neighbours."""
import itertools
import logging
from abc import ABC, abstractmethod
from typing import List, Sequence, Tuple, Union

import numpy as np

from app.core.constants import SHATTER_POINT_CAP, VC_RANDOM_CONFIGURATIONS, VC_SEARCH_CAP
from app.core.exceptions import ConfigurationError, DomainError, RefusedError
from app.models.dataset import Dataset
from app.models.learner import (
    HistogramPredictor,
    HypothesisClass,
    IntervalPredictor,
    KnnPredictor,
    StumpPredictor,
    histogram_cells,
)
from app.models.loss import ConvexSurrogate, LossFunction
from app.services.losses import BINARY_LABELS, surrogate_value

logger = logging.getLogger(__name__)

Objective = Union[LossFunction, ConvexSurrogate]
ErmPredictor = Union[StumpPredictor, IntervalPredictor, HistogramPredictor]


def binary_labels(labels: Sequence[int]) -> Tuple[int, int]:
    """The (negative, positive) label pair used by binary classes.

    A single observed label is paired with its binary partner so that a
    constant training set still yields a two-label predictor.
    """
    labels = tuple(int(v) for v in labels)
    if len(labels) == 2:
        return labels
    if len(labels) == 1:
        if labels[0] in BINARY_LABELS:
            return BINARY_LABELS
        return labels[0], labels[0] + 1
    raise ConfigurationError(f"binary hypothesis classes need at most two labels, got {labels}")


def _costs(objective: Objective) -> Tuple[float, float]:
    """Per-sample cost of a correct and of a wrong +/-1 prediction."""
    if isinstance(objective, ConvexSurrogate):
        correct = float(surrogate_value(objective.c_kind, -1.0))
        wrong = float(surrogate_value(objective.c_kind, 1.0))
        if objective.clamp:
            correct, wrong = min(correct, 1.0), min(wrong, 1.0)
        return correct, wrong
    if objective.kind != "zero-one":
        raise ConfigurationError(f"ERM classifiers need the zero-one loss, got {objective.kind!r}")
    return 0.0, 1.0


def _thresholds(values: np.ndarray) -> np.ndarray:
    """-inf, the midpoints between consecutive distinct values, +inf."""
    unique = np.unique(values)
    midpoints = (unique[:-1] + unique[1:]) / 2.0
    return np.concatenate(([-np.inf], midpoints, [np.inf]))


def _cumulative_counts(column: np.ndarray, positive: np.ndarray):
    """Positive and negative counts at or below each candidate threshold."""
    unique, inverse = np.unique(column, return_inverse=True)
    pos = np.bincount(inverse, weights=positive.astype(float), minlength=len(unique))
    neg = np.bincount(inverse, weights=(~positive).astype(float), minlength=len(unique))
    pos_below = np.concatenate(([0.0], np.cumsum(pos)))
    neg_below = np.concatenate(([0.0], np.cumsum(neg)))
    return pos_below, neg_below


def _fit_stump(hclass: HypothesisClass, data: Dataset, objective: Objective) -> StumpPredictor:
    labels = binary_labels(data.labels)
    column = data.x[:, hclass.feature]
    positive = data.y == labels[1]
    thresholds = _thresholds(column)
    pos_below, neg_below = _cumulative_counts(column, positive)
    total_pos, total_neg = pos_below[-1], neg_below[-1]

    wrong_by_direction = {
        -1: neg_below + (total_pos - pos_below),
        1: pos_below + (total_neg - neg_below),
    }
    directions = (-1, 1) if hclass.two_sided else (1,)
    correct_cost, wrong_cost = _costs(objective)

    best = None
    for direction in directions:
        wrong = wrong_by_direction[direction]
        cost = (wrong * wrong_cost + (data.n - wrong) * correct_cost) / data.n
        index = int(np.argmin(cost))
        # Strict improvement keeps the lexicographically smallest (direction, threshold)
        if best is None or cost[index] < best[0]:
            best = (cost[index], direction, float(thresholds[index]))

    _, direction, threshold = best
    return StumpPredictor(labels=labels, feature=hclass.feature, direction=direction,
                          threshold=threshold)


def _fit_interval(hclass: HypothesisClass, data: Dataset,
                  objective: Objective) -> IntervalPredictor:
    labels = binary_labels(data.labels)
    column = data.x[:, hclass.feature]
    positive = data.y == labels[1]
    thresholds = _thresholds(column)
    pos_below, neg_below = _cumulative_counts(column, positive)
    total_pos = pos_below[-1]

    # Empty interval first, then (a, b) pairs in row-major order of thresholds
    lower_idx, upper_idx = np.triu_indices(len(thresholds), k=1)
    lower_idx = np.concatenate(([0], lower_idx))
    upper_idx = np.concatenate(([0], upper_idx))
    inside_pos = pos_below[upper_idx] - pos_below[lower_idx]
    inside_neg = neg_below[upper_idx] - neg_below[lower_idx]
    wrong = (total_pos - inside_pos) + inside_neg

    correct_cost, wrong_cost = _costs(objective)
    cost = (wrong * wrong_cost + (data.n - wrong) * correct_cost) / data.n
    index = int(np.argmin(cost))
    lower = float(thresholds[lower_idx[index]])
    upper = float(thresholds[upper_idx[index]])
    return IntervalPredictor(labels=labels, feature=hclass.feature, lower=lower, upper=upper)


def _fit_histogram(hclass: HypothesisClass, data: Dataset,
                   objective: Objective) -> HistogramPredictor:
    if isinstance(objective, ConvexSurrogate):
        labels = binary_labels(data.labels)
    else:
        _costs(objective)
        labels = tuple(data.labels)
    cells = histogram_cells(data.x[:, hclass.feature], hclass.low, hclass.high, hclass.bins)

    counts = np.zeros((hclass.bins, len(labels)), dtype=np.int64)
    for j, label in enumerate(labels):
        counts[:, j] = np.bincount(cells[data.y == label], minlength=hclass.bins)
    # Majority per cell; argmax ties and empty cells go to the smallest label
    cell_labels = tuple(int(labels[j]) for j in np.argmax(counts, axis=1))
    return HistogramPredictor(labels=labels, feature=hclass.feature, low=hclass.low,
                              high=hclass.high, cell_labels=cell_labels)


_FITTERS = {"stump": _fit_stump, "interval": _fit_interval, "histogram": _fit_histogram}


def erm_fit(hclass: HypothesisClass, data: Dataset,
            objective: Objective = LossFunction()) -> ErmPredictor:
    """Empirical risk minimizer over ``hclass``.

    Ties resolve to the lexicographically smallest canonical parameter tuple,
    so the result depends only on the multiset of training samples.
    """
    if data.task != "classification":
        raise ConfigurationError("ERM learners are classifiers and need a classification set")
    if hclass.feature >= data.dim:
        raise DomainError(f"feature {hclass.feature} missing from {data.dim}-dimensional data")
    return _FITTERS[hclass.kind](hclass, data, objective)


def empirical_objective(predictor, data: Dataset, objective: Objective = LossFunction()) -> float:
    """Mean training objective of a fitted classifier."""
    correct_cost, wrong_cost = _costs(objective)
    wrong = predictor.predict(data.x) != data.y
    return float(np.where(wrong, wrong_cost, correct_cost).mean())


def candidate_predictors(hclass: HypothesisClass, data: Dataset) -> List[ErmPredictor]:
    """All canonical hypotheses of ``hclass`` on the training points."""
    labels = binary_labels(data.labels) if hclass.kind != "histogram" else tuple(data.labels)
    column = data.x[:, hclass.feature]
    thresholds = [float(t) for t in _thresholds(column)]

    if hclass.kind == "stump":
        directions = (-1, 1) if hclass.two_sided else (1,)
        return [StumpPredictor(labels=labels, feature=hclass.feature, direction=d, threshold=t)
                for d in directions for t in thresholds]
    if hclass.kind == "interval":
        pairs = [(-np.inf, -np.inf)] + list(itertools.combinations(thresholds, 2))
        return [IntervalPredictor(labels=labels, feature=hclass.feature, lower=a, upper=b)
                for a, b in pairs]
    return [HistogramPredictor(labels=labels, feature=hclass.feature, low=hclass.low,
                               high=hclass.high, cell_labels=cell_labels)
            for cell_labels in itertools.product(labels, repeat=hclass.bins)]


def _dichotomies(hclass: HypothesisClass, column: np.ndarray) -> int:
    """Number of distinct labelings ``hclass`` realizes on the points."""
    if hclass.kind == "histogram":
        occupied = np.unique(histogram_cells(column, hclass.low, hclass.high, hclass.bins))
        return 2 ** len(occupied)

    thresholds = _thresholds(column)
    if hclass.kind == "stump":
        right = column[None, :] > thresholds[:, None]
        patterns = [right] + ([~right] if hclass.two_sided else [])
        rows = np.concatenate(patterns, axis=0)
    else:
        lower_idx, upper_idx = np.triu_indices(len(thresholds), k=1)
        lower = thresholds[lower_idx][:, None]
        upper = thresholds[upper_idx][:, None]
        rows = (column[None, :] > lower) & (column[None, :] <= upper)
        rows = np.concatenate((np.zeros((1, len(column)), dtype=bool), rows), axis=0)
    return len(np.unique(rows, axis=0))


def shatter_coefficient(hclass: HypothesisClass, points: np.ndarray) -> int:
    """|{(f(z_1), ..., f(z_m)) : f in hclass}| by exhaustive enumeration."""
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    m = points.shape[0]
    if m > SHATTER_POINT_CAP:
        raise RefusedError(f"shatter coefficient enumeration is capped at {SHATTER_POINT_CAP} "
                           f"points, got {m}")
    if hclass.feature >= points.shape[1]:
        raise DomainError(f"feature {hclass.feature} missing from {points.shape[1]}-D points")
    return _dichotomies(hclass, points[:, hclass.feature])


def _candidate_configurations(hclass: HypothesisClass, m: int, rng: np.random.Generator):
    span = hclass.high - hclass.low if hclass.kind == "histogram" else 1.0
    start = hclass.low if hclass.kind == "histogram" else 0.0
    yield start + (np.arange(m) + 0.5) / m * span
    for _ in range(VC_RANDOM_CONFIGURATIONS):
        yield start + rng.random(m) * span


def max_shatter(hclass: HypothesisClass, m: int, seed: int = 0) -> int:
    """Largest shatter coefficient found over candidate configurations of m points."""
    if m < 1:
        raise DomainError("need at least one point")
    rng = np.random.default_rng(seed)
    return max(_dichotomies(hclass, column) for column in _candidate_configurations(hclass, m, rng))


def vc_lower_bound(hclass: HypothesisClass, max_n: int = VC_SEARCH_CAP, seed: int = 0) -> int:
    """Largest m <= max_n for which some candidate configuration is shattered."""
    if max_n > VC_SEARCH_CAP:
        raise RefusedError(f"VC search is capped at {VC_SEARCH_CAP} points, got {max_n}")
    found = 0
    for m in range(1, max_n + 1):
        if max_shatter(hclass, m, seed) == 2 ** m:
            found = m
        else:
            break
    logger.debug(f"VC lower bound for {hclass.kind}: {found}")
    return found


def knn_fit(data: Dataset, k: int) -> KnnPredictor:
    """Store the training set in canonical order (lexicographic on (x, y))."""
    if k < 1:
        raise ConfigurationError(f"k must be at least 1, got {k}")
    if k > data.n:
        raise DomainError(f"k={k} exceeds the {data.n} training points")
    keys = [data.y] + [data.x[:, j] for j in reversed(range(data.dim))]
    order = np.lexsort(keys)
    if data.task == "classification":
        labels = binary_labels(data.labels) if len(data.labels) <= 2 else tuple(data.labels)
        train_y = tuple(int(v) for v in data.y[order])
    else:
        labels = ()
        train_y = tuple(float(v) for v in data.y[order])
    return KnnPredictor(
        labels=labels,
        k=k,
        task=data.task,
        train_x=tuple(tuple(float(v) for v in row) for row in data.x[order]),
        train_y=train_y,
    )


class BaseLearner(ABC):
    """A deterministic map from learning sets to predictors."""

    @abstractmethod
    def fit(self, data: Dataset):
        pass

    @property
    @abstractmethod
    def description(self) -> dict:
        pass


class ErmLearner(BaseLearner):
    def __init__(self, hclass: HypothesisClass, objective: Objective = LossFunction()):
        self.hclass = hclass
        self.objective = objective

    def fit(self, data: Dataset) -> ErmPredictor:
        return erm_fit(self.hclass, data, self.objective)

    @property
    def vc(self) -> int:
        return self.hclass.declared_vc

    @property
    def description(self) -> dict:
        return {"learner": "erm", "class": self.hclass.model_dump(),
                "objective": self.objective.model_dump()}


class KnnLearner(BaseLearner):
    def __init__(self, k: int):
        self.k = k

    def fit(self, data: Dataset) -> KnnPredictor:
        return knn_fit(data, self.k)

    @property
    def description(self) -> dict:
        return {"learner": "knn", "k": self.k}
