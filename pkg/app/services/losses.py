"""Bounded losses and convex surrogates."""
import math
from typing import Optional, Sequence, Union

import numpy as np

from app.core.exceptions import DomainError
from app.models.loss import ConvexSurrogate, LossFunction

Label = Union[int, float]

BINARY_LABELS = (1, 2)


def _check_label(loss: LossFunction, label: Label) -> None:
    if loss.labels is not None and label not in loss.labels:
        raise DomainError(f"label {label!r} outside declared label set {loss.labels}")


def evaluate_loss(loss: LossFunction, y_true: Label, y_pred: Label) -> float:
    """Loss of one prediction, always in [0, 1]."""
    if loss.kind == "zero-one":
        _check_label(loss, y_true)
        _check_label(loss, y_pred)
        return 0.0 if y_true == y_pred else 1.0

    if not (math.isfinite(y_true) and math.isfinite(y_pred)):
        raise DomainError(f"non-finite regression values {y_true!r}, {y_pred!r}")
    diff = abs(float(y_true) - float(y_pred))
    if loss.kind == "clipped-absolute":
        return min(diff, 1.0)
    return min(diff * diff, 1.0)


def loss_vector(loss: LossFunction, y_true: Sequence, y_pred: Sequence) -> np.ndarray:
    """Vectorized ``evaluate_loss``."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise DomainError(f"shape mismatch {y_true.shape} vs {y_pred.shape}")

    if loss.kind == "zero-one":
        if loss.labels is not None:
            allowed = np.asarray(loss.labels)
            bad = ~np.isin(y_true, allowed) | ~np.isin(y_pred, allowed)
            if bad.any():
                raise DomainError(f"labels outside declared label set {loss.labels}")
        return (y_true != y_pred).astype(float)

    diff = np.abs(y_true.astype(float) - y_pred.astype(float))
    if not np.all(np.isfinite(diff)):
        raise DomainError("non-finite regression values")
    if loss.kind == "clipped-absolute":
        return np.minimum(diff, 1.0)
    return np.minimum(diff * diff, 1.0)


def signed_label(y: Label, labels: Sequence[int] = BINARY_LABELS) -> float:
    """Map the first binary label to -1 and the second to +1."""
    if y == labels[0]:
        return -1.0
    if y == labels[1]:
        return 1.0
    raise DomainError(f"label {y!r} is not one of the binary labels {tuple(labels)}")


def margin(y: Label, score: float, labels: Sequence[int] = BINARY_LABELS) -> float:
    """h(y, s) = -y s, linear in s; nonnegative exactly when s misclassifies y."""
    return -signed_label(y, labels) * score


def surrogate_value(c_kind: str, h):
    """C(h) for the hinge, exponential and logit costs."""
    h = np.asarray(h, dtype=float)
    if c_kind == "hinge":
        out = np.maximum(1.0 + h, 0.0)
    elif c_kind == "exponential":
        out = np.exp(h)
    elif c_kind == "logit":
        # log2(1 + e^h) without overflow for large h
        out = np.logaddexp(0.0, h) / math.log(2.0)
    else:
        raise DomainError(f"unknown surrogate {c_kind!r}")
    return out if out.ndim else float(out)


def evaluate_surrogate(
    s: ConvexSurrogate,
    y: Label,
    score: float,
    labels: Optional[Sequence[int]] = None,
) -> float:
    """C(h(y, score)), clamped into [0, 1] when the surrogate asks for it."""
    if not math.isfinite(score):
        raise DomainError(f"non-finite score {score!r}")
    value = float(surrogate_value(s.c_kind, margin(y, score, labels or BINARY_LABELS)))
    if s.clamp:
        value = min(value, 1.0)
    return value


def surrogate_vector(
    s: ConvexSurrogate,
    y: Sequence,
    scores: Sequence,
    labels: Sequence[int] = BINARY_LABELS,
) -> np.ndarray:
    """Vectorized ``evaluate_surrogate``."""
    y = np.asarray(y)
    scores = np.asarray(scores, dtype=float)
    if not np.all(np.isfinite(scores)):
        raise DomainError("non-finite score")
    signs = np.where(y == labels[0], -1.0, np.where(y == labels[1], 1.0, np.nan))
    if np.isnan(signs).any():
        raise DomainError(f"labels outside the binary labels {tuple(labels)}")
    values = np.asarray(surrogate_value(s.c_kind, -signs * scores), dtype=float)
    if s.clamp:
        values = np.minimum(values, 1.0)
    return values
