import math

import numpy as np
import pytest

from app.core.exceptions import DomainError
from app.models.loss import ConvexSurrogate, LossFunction
from app.services.losses import (
    evaluate_loss,
    evaluate_surrogate,
    loss_vector,
    margin,
    surrogate_value,
    surrogate_vector,
)


def test_zero_one_loss():
    assert evaluate_loss(LossFunction(), 1, 1) == 0.0
    assert evaluate_loss(LossFunction(), 1, 2) == 1.0


def test_clipped_losses():
    assert evaluate_loss(LossFunction(kind="clipped-absolute"), 0.3, 0.9) == pytest.approx(0.6)
    assert evaluate_loss(LossFunction(kind="clipped-absolute"), 0.0, 3.0) == 1.0
    assert evaluate_loss(LossFunction(kind="clipped-squared"), 0.0, 0.5) == pytest.approx(0.25)
    assert evaluate_loss(LossFunction(kind="clipped-squared"), 0.0, -2.0) == 1.0


def test_label_outside_declared_set():
    loss = LossFunction(labels=(1, 2))
    with pytest.raises(DomainError):
        evaluate_loss(loss, 1, 3)
    with pytest.raises(DomainError):
        loss_vector(loss, [1, 2], [2, 5])


def test_loss_vector_matches_scalar_loss():
    rng = np.random.default_rng(0)
    y_true = rng.normal(size=50)
    y_pred = rng.normal(size=50)
    for kind in ("clipped-absolute", "clipped-squared"):
        loss = LossFunction(kind=kind)
        values = loss_vector(loss, y_true, y_pred)
        expected = [evaluate_loss(loss, a, b) for a, b in zip(y_true, y_pred)]
        assert np.allclose(values, expected, rtol=0, atol=1e-15)
        assert np.all((values >= 0) & (values <= 1))


def test_surrogate_examples():
    # h = -1: label 2 (sign +1) scored at +1
    assert evaluate_surrogate(ConvexSurrogate(c_kind="hinge"), 2, 1.0) == 0.0
    assert evaluate_surrogate(ConvexSurrogate(c_kind="exponential"), 2, 0.0) == 1.0
    assert evaluate_surrogate(ConvexSurrogate(c_kind="logit"), 1, 0.0) == pytest.approx(1.0)


def test_surrogate_clamp():
    assert evaluate_surrogate(ConvexSurrogate(c_kind="hinge"), 1, 0.5) == 1.0
    unclamped = ConvexSurrogate(c_kind="hinge", clamp=False)
    assert evaluate_surrogate(unclamped, 1, 0.5) == pytest.approx(1.5)


def test_surrogate_rejects_non_finite_score():
    with pytest.raises(DomainError):
        evaluate_surrogate(ConvexSurrogate(), 1, math.inf)
    with pytest.raises(DomainError):
        surrogate_vector(ConvexSurrogate(), [1, 2], [0.0, math.nan])


def test_surrogate_convexity():
    rng = np.random.default_rng(1)
    a = rng.uniform(-5, 5, size=1000)
    b = rng.uniform(-5, 5, size=1000)
    for kind in ("hinge", "exponential", "logit"):
        mid = surrogate_value(kind, (a + b) / 2)
        chord = (surrogate_value(kind, a) + surrogate_value(kind, b)) / 2
        assert np.all(mid <= chord + 1e-12), f"{kind} is not midpoint convex"


def test_margin_is_linear_in_score():
    rng = np.random.default_rng(2)
    for _ in range(200):
        y = int(rng.integers(1, 3))
        s1, s2, lam = rng.normal(), rng.normal(), rng.random()
        combined = margin(y, lam * s1 + (1 - lam) * s2)
        assert combined == pytest.approx(lam * margin(y, s1) + (1 - lam) * margin(y, s2),
                                         abs=1e-12)


def test_surrogate_dominates_zero_one_on_mistakes():
    scores = np.linspace(-3, 3, 121)
    for kind in ("hinge", "exponential", "logit"):
        surrogate = ConvexSurrogate(c_kind=kind)
        for y in (1, 2):
            values = surrogate_vector(surrogate, np.full(scores.shape, y), scores)
            flagged = np.array([margin(y, s) >= 0 for s in scores])
            assert np.all(values[flagged] >= 1.0 - 1e-12)
