"""Subagged predictors and their cross-validated risk estimates."""
import logging
import math
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from app.core.constants import TIE_TOLERANCE
from app.core.exceptions import ConfigurationError, DomainError, RefusedError
from app.models.cv import CvScheme, WeightedVectorSet
from app.models.dataset import Dataset
from app.models.ensemble import (
    Aggregation,
    CvEstimate,
    EnsembleMember,
    EstimateVariant,
    MistakeMatrix,
    RiskEstimate,
    SubaggedEnsemble,
)
from app.models.loss import ConvexSurrogate, LossFunction
from app.services.cv_schemes import enumerate_vectors
from app.services.learners import BaseLearner, binary_labels
from app.services.losses import loss_vector, surrogate_vector
from app.utils.batch_processor import parallel_map

logger = logging.getLogger(__name__)

Evaluation = Union[LossFunction, ConvexSurrogate]
SchemeLike = Union[CvScheme, WeightedVectorSet]


def _vector_set(scheme: SchemeLike, data: Dataset) -> WeightedVectorSet:
    vectors = enumerate_vectors(scheme) if isinstance(scheme, CvScheme) else scheme
    if vectors.n != data.n:
        raise ConfigurationError(f"scheme is defined over n={vectors.n} but the dataset has "
                                 f"{data.n} samples")
    return vectors


class SubaggingService:
    """Fits subagged ensembles and computes their cross-validated estimates.

    ``threads`` members are fitted concurrently; results do not depend on it.
    """

    def __init__(self, threads: int = 1, show_progress: bool = False):
        self.threads = threads
        self.show_progress = show_progress

    def fit(
        self,
        learner: BaseLearner,
        data: Dataset,
        scheme: SchemeLike,
        aggregation: Aggregation = "average",
    ) -> SubaggedEnsemble:
        """Fit one member per training vector, each on exactly its mask's subsample."""
        data.require_learning_set()
        vectors = _vector_set(scheme, data)
        if aggregation == "majority" and data.task != "classification":
            raise ConfigurationError("majority aggregation needs a classification task")

        predictors = parallel_map(
            lambda vector: learner.fit(data.subset(vector.mask)),
            vectors.vectors,
            threads=self.threads,
            description="Fitting members",
            show_progress=self.show_progress,
        )
        members = tuple(
            EnsembleMember(mask=vector.mask, weight=weight, predictor=predictor)
            for (vector, weight), predictor in zip(vectors.entries, predictors)
        )
        logger.info(f"Fitted subagged ensemble: {len(members)} members, "
                    f"aggregation={aggregation}, exact={vectors.exact}")
        return SubaggedEnsemble(
            members=members,
            aggregation=aggregation,
            task=data.task,
            labels=data.labels,
            exact=vectors.exact,
            scheme=scheme if isinstance(scheme, CvScheme) else None,
            learner=learner.description,
        )

    def estimate(
        self,
        learner: BaseLearner,
        data: Dataset,
        scheme: SchemeLike,
        variants: Sequence[EstimateVariant] = ("out", "in", "maj"),
        evaluation: Evaluation = LossFunction(),
        aggregation: Aggregation = "average",
    ) -> Dict[str, CvEstimate]:
        """Fit once and compute every requested estimate."""
        e = self.fit(learner, data, scheme, aggregation)
        return {variant: estimate_from_ensemble(e, data, variant, evaluation)
                for variant in variants}


def subag_fit(
    learner: BaseLearner,
    data: Dataset,
    scheme: SchemeLike,
    aggregation: Aggregation = "average",
    threads: int = 1,
) -> SubaggedEnsemble:
    """Fit one member per training vector, each on exactly its mask's subsample."""
    return SubaggingService(threads=threads).fit(learner, data, scheme, aggregation)


def _as_queries(x) -> Tuple[np.ndarray, bool]:
    """Promote a single feature vector to a one-row matrix."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return x.reshape(1, -1), True
    if x.ndim != 2:
        raise DomainError(f"queries must be a feature vector or a 2-D array, got shape {x.shape}")
    return x, False


def member_outputs(e: SubaggedEnsemble, x: np.ndarray) -> np.ndarray:
    """Real outputs of every member, shape (members, queries).

    Classification members contribute their scores, regression members
    their predicted values.
    """
    return np.stack([m.predictor.decision_function(x) for m in e.members]).astype(float)


def predict_average(e: SubaggedEnsemble, x):
    """Weighted mean of member outputs."""
    if e.aggregation != "average":
        raise ConfigurationError(f"predict_average needs average aggregation, got {e.aggregation}")
    queries, single = _as_queries(x)
    values = e.weights @ member_outputs(e, queries)
    return float(values[0]) if single else values


def _majority_labels(e: SubaggedEnsemble, queries: np.ndarray, loss: LossFunction) -> np.ndarray:
    votes = np.stack([m.predictor.predict(queries) for m in e.members])
    weights = e.weights
    costs = np.stack([
        weights @ np.stack([loss_vector(loss, np.full(queries.shape[0], label), row)
                            for row in votes])
        for label in e.labels
    ])
    # Smallest label among those within tolerance of the minimal expected loss
    best = costs.min(axis=0)
    winners = costs <= best + TIE_TOLERANCE
    return np.asarray(e.labels)[np.argmax(winners, axis=0)]


def predict_majority(e: SubaggedEnsemble, x, loss: LossFunction = LossFunction()):
    """Label minimizing the weighted expected loss over members.

    With the zero-one loss this is the weighted plurality vote, ties going
    to the smallest label.
    """
    if e.aggregation != "majority":
        raise ConfigurationError(f"predict_majority needs majority aggregation, "
                                 f"got {e.aggregation}")
    queries, single = _as_queries(x)
    labels = _majority_labels(e, queries, loss)
    return int(labels[0]) if single else labels


def aggregate_predict(e: SubaggedEnsemble, x) -> np.ndarray:
    """Predictions of the ensemble as a single predictor, one per query row."""
    queries, _ = _as_queries(x)
    if e.aggregation == "majority":
        return predict_majority(e, queries)
    scores = predict_average(e, queries)
    if e.task == "regression":
        return scores
    negative, positive = e.labels[0], e.labels[-1]
    return np.where(scores > 0, positive, negative)


def _member_losses(e: SubaggedEnsemble, data: Dataset, variant: str,
                   evaluation: Evaluation) -> List[float]:
    errors = []
    for member in e.members:
        mask = np.asarray(member.mask)
        selected = data.subset(mask if variant == "in" else 1 - mask)
        errors.append(_mean_loss(member.predictor, selected, evaluation, e.labels))
    return errors


def _mean_loss(predictor, data: Dataset, evaluation: Evaluation,
               labels: Sequence[int]) -> float:
    if isinstance(evaluation, ConvexSurrogate):
        values = surrogate_vector(evaluation, data.y, predictor.decision_function(data.x),
                                  labels=binary_labels(labels))
    else:
        values = loss_vector(evaluation, data.y, predictor.predict(data.x))
    return math.fsum(values) / len(values)


def _clip_unit(value: float) -> float:
    return min(max(value, 0.0), 1.0)


def majority_estimate_from_errors(errors: Sequence[float]) -> Tuple[float, int]:
    """Mean of the l = floor(N/2) + 1 smallest member errors, and l."""
    if not errors:
        raise DomainError("no member errors")
    count = len(errors) // 2 + 1
    smallest = sorted(errors)[:count]
    return _clip_unit(math.fsum(smallest) / count), count


def estimate_from_ensemble(
    e: SubaggedEnsemble,
    data: Dataset,
    variant: EstimateVariant,
    evaluation: Evaluation = LossFunction(),
) -> CvEstimate:
    """R_CV^Out, R_CV^In or R_CV^Maj of a fitted ensemble on its learning set."""
    if len(e.members[0].mask) != data.n:
        raise ConfigurationError(f"ensemble masks have length {len(e.members[0].mask)} but the "
                                 f"dataset has {data.n} samples")
    if variant == "maj":
        if not e.exact:
            raise RefusedError("the majority estimate needs an exact training-vector set")
        if not e.vector_set.is_uniform:
            raise RefusedError("the majority estimate needs uniformly weighted training vectors")

    errors = _member_losses(e, data, "in" if variant == "in" else "out", evaluation)
    if variant == "maj":
        value, count = majority_estimate_from_errors(errors)
        return CvEstimate(variant="maj", value=value, exact=True,
                          per_member_errors=tuple(errors), l=count)

    value = _clip_unit(math.fsum(w * r for w, r in zip(e.weights.tolist(), errors)))
    return CvEstimate(variant=variant, value=value, exact=e.exact,
                      per_member_errors=tuple(errors))


def estimate_all(
    learner: BaseLearner,
    data: Dataset,
    scheme: SchemeLike,
    variants: Sequence[EstimateVariant] = ("out", "in", "maj"),
    evaluation: Evaluation = LossFunction(),
    threads: int = 1,
) -> Dict[str, CvEstimate]:
    """Fit once and compute every requested estimate."""
    return SubaggingService(threads=threads).estimate(learner, data, scheme, variants, evaluation)


def r_hat_cv_out(learner: BaseLearner, data: Dataset, scheme: SchemeLike,
                 evaluation: Evaluation = LossFunction(), threads: int = 1) -> CvEstimate:
    """Weighted mean over training vectors of each member's test-subsample loss."""
    return estimate_all(learner, data, scheme, ("out",), evaluation, threads)["out"]


def r_hat_cv_in(learner: BaseLearner, data: Dataset, scheme: SchemeLike,
                evaluation: Evaluation = LossFunction(), threads: int = 1) -> CvEstimate:
    """Weighted mean over training vectors of each member's training-subsample loss."""
    return estimate_all(learner, data, scheme, ("in",), evaluation, threads)["in"]


def r_hat_cv_maj(learner: BaseLearner, data: Dataset, scheme: SchemeLike,
                 evaluation: Evaluation = LossFunction(), threads: int = 1) -> CvEstimate:
    """Mean out-sample error of the best strict majority of members."""
    return estimate_all(learner, data, scheme, ("maj",), evaluation, threads)["maj"]


def true_risk(e: SubaggedEnsemble, ghost: Dataset, loss: LossFunction = LossFunction()
              ) -> RiskEstimate:
    """Ghost-sample mean loss of the aggregated predictor."""
    if ghost.n < 1:
        raise DomainError("empty ghost sample")
    losses = loss_vector(loss, ghost.y, aggregate_predict(e, ghost.x))
    value = math.fsum(losses) / ghost.n
    return RiskEstimate(value=value, standard_error=float(np.std(losses) / math.sqrt(ghost.n)),
                        m=ghost.n)


def surrogate_risk(e: SubaggedEnsemble, ghost: Dataset, surrogate: ConvexSurrogate,
                   level: str = "aggregate") -> float:
    """Ghost-sample surrogate risk of the averaged score or the weighted member average.

    By convexity of C the aggregate level never exceeds the member level
    when the surrogate is not clamped.
    """
    if e.task != "classification":
        raise ConfigurationError("surrogate risks need a classification ensemble")
    outputs = member_outputs(e, ghost.x)
    labels = binary_labels(e.labels)
    if level == "aggregate":
        values = surrogate_vector(surrogate, ghost.y, e.weights @ outputs, labels=labels)
        return math.fsum(values) / ghost.n
    if level == "member":
        per_member = [math.fsum(surrogate_vector(surrogate, ghost.y, row, labels=labels))
                      / ghost.n for row in outputs]
        return math.fsum(w * r for w, r in zip(e.weights.tolist(), per_member))
    raise ConfigurationError(f"unknown surrogate level {level!r}")


def mistake_matrix(e: SubaggedEnsemble, ghost: Dataset) -> MistakeMatrix:
    """Zero-one mistakes of every member on every ghost point, shape (m, members)."""
    if e.task != "classification":
        raise ConfigurationError("mistake matrices need a classification ensemble")
    wrong = np.stack([m.predictor.predict(ghost.x) != ghost.y for m in e.members], axis=1)
    return MistakeMatrix(entries=tuple(tuple(int(v) for v in row) for row in wrong))
