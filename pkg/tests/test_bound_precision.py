"""Log-domain bounds against direct evaluation in 50-digit decimal arithmetic."""
import math
from decimal import Decimal, localcontext

import pytest

from app.services.bounds import (
    bound_kfold,
    stability_l1_bound,
    stability_strong_bound,
    stability_weak_bound,
)
from app.services.split_select import f_inverse

PRECISION = 50
REL = 1e-12


def D(value) -> Decimal:
    return Decimal(value)


def _log_min(*branches: Decimal) -> float:
    """ln of the smallest branch, before clamping."""
    return float(min(branches).ln())


def assert_matches(bound, log_reference: float):
    assert bound.log_value == pytest.approx(log_reference, rel=REL, abs=REL)
    assert bound.value == pytest.approx(min(1.0, math.exp(log_reference)), rel=1e-9)


def reference_kfold(n: int, k: int, eps: float, vc: int) -> float:
    with localcontext() as ctx:
        ctx.prec = PRECISION
        n_, k_, e, v = D(n), D(k), D(eps), D(vc)
        fold = n_ / k_
        vc_branch = (2 * fold + 1) ** (4 * k_ * v) * (-n_ * e * e).exp()
        hoeffding = (-2 * n_ * e * e / k_).exp()
        denominator = 64 * ((v * (2 * (2 * fold + 1)).ln()).sqrt() + 2)
        vc_hoeffding = D(2) ** k_ * (-n_ * e * e / denominator).exp()
        return _log_min(vc_branch, hoeffding, vc_hoeffding)


def reference_strong(n: int, p: float, eps: float, lam: float, delta: float,
                     alpha=None) -> float:
    with localcontext() as ctx:
        ctx.prec = PRECISION
        n_, p_, e, l_, d = D(n), D(p), D(eps), D(lam), D(delta)
        hoeffding = (-2 * n_ * p_ * e * e).exp()
        if alpha is None:
            scale = 8 * (16 * l_) ** 2 * n_ * p_ * p_
            failure = n_ / (8 * l_ * p_) * d
        else:
            a = D(alpha)
            scale = 8 * n_ * (8 * l_ * n_ * p_ + a) ** 2
            failure = n_ / a * d
        kutin = 2 * ((-e * e / scale).exp() + failure)
        return _log_min(hoeffding, kutin)


def reference_weak(n: int, p: float, eps: float, lam: float, delta: float) -> float:
    with localcontext() as ctx:
        ctx.prec = PRECISION
        n_, p_, e, l_, d = D(n), D(p), D(eps), D(lam), D(delta)
        hoeffding = (-2 * n_ * p_ * e * e).exp()
        a = 9 * l_ * n_ * p_
        root = d.sqrt()
        weak = (2 * ((-n_ * e * e / (10 * a * a)).exp()
                     + n_ * root / (9 * l_ * p_) * (e * n_ / (4 * a * a)).exp())
                + n_ * root)
        return _log_min(hoeffding, weak)


def reference_stability_l1(n: int, p: float, lam: float, delta: float) -> float:
    with localcontext() as ctx:
        ctx.prec = PRECISION
        n_, p_, l_, d = D(n), D(p), D(lam), D(delta)
        generic = (1 / (n_ * p_)).sqrt()
        stability = (D(16) ** 3 * n_).sqrt() * l_ * p_ + n_ / (4 * l_ * p_) * d
        return _log_min(generic, stability)


def reference_f_inverse(n: int, p: float, delta: float, vc: int, variant: str) -> float:
    with localcontext() as ctx:
        ctx.prec = PRECISION
        n_, p_, d, v = D(n), D(p), D(delta), D(vc)
        log_inverse = -d.ln()
        hoeffding = (log_inverse / (2 * n_ * p_)).sqrt()
        if variant == "sym":
            vc_test = ((4 * v / p_ * (2 * n_ * p_ + 1).ln() + log_inverse) / n_).sqrt()
            return float(min(hoeffding, vc_test))
        q = 1 - p_
        if p_ < D(1) / 18:
            eps_sq = 4 * v * (2 * n_ * q + 1).ln() / (n_ * q * (D(1) / 9 - 2 * p_))
            if d < (-2 * n_ * p_ * eps_sq).exp():
                return float(3 * ((4 * v * (2 * n_ * q + 1).ln() / q + log_inverse) / n_).sqrt())
        return float(hoeffding)


@pytest.mark.parametrize("n, k, vc", [(100, 10, 1), (1000, 5, 2), (60, 2, 1), (500, 50, 3)])
@pytest.mark.parametrize("eps", [0.05, 0.2, 0.45])
def test_bound_kfold_matches_decimal_reference(n, k, vc, eps):
    assert_matches(bound_kfold(n, k, eps, vc), reference_kfold(n, k, eps, vc))


@pytest.mark.parametrize("lam, delta, alpha", [
    (1e-4, 1e-12, None),
    (1e-4, 0.0, None),
    (1e-3, 1e-9, None),
    (1e-4, 1e-6, 1.0),
    (1e-5, 0.0, 0.01),
])
@pytest.mark.parametrize("eps", [0.02, 0.05, 0.1, 0.3])
def test_stability_strong_matches_decimal_reference(lam, delta, alpha, eps):
    bound = stability_strong_bound(500, 0.1, eps, lam, delta, alpha=alpha)
    assert_matches(bound, reference_strong(500, 0.1, eps, lam, delta, alpha))


@pytest.mark.parametrize("n, p, lam, delta", [
    (500, 0.1, 1e-4, 0.0),
    (500, 0.1, 1e-4, 1e-12),
    (200, 0.25, 1e-3, 1e-20),
    (1000, 0.05, 1e-2, 0.0),
])
@pytest.mark.parametrize("eps", [0.01, 0.05, 0.2])
def test_stability_weak_matches_decimal_reference(n, p, lam, delta, eps):
    assert_matches(stability_weak_bound(n, p, eps, lam, delta),
                   reference_weak(n, p, eps, lam, delta))


@pytest.mark.parametrize("n, p, lam, delta", [
    (10_000, 0.5, 1e-8, 0.0),
    (10_000, 0.5, 1e-6, 1e-12),
    (10_000, 0.5, 1e-8, 1e-12),
    (400, 0.1, 1e-3, 1e-7),
    (50, 0.2, 0.5, 0.0),
])
def test_stability_l1_matches_decimal_reference(n, p, lam, delta):
    assert_matches(stability_l1_bound(n, p, lam, delta),
                   reference_stability_l1(n, p, lam, delta))


@pytest.mark.parametrize("n, p", [(2000, 0.02), (2000, 0.2), (300, 0.01), (50, 0.5)])
@pytest.mark.parametrize("delta", [0.5, 0.05, 1e-12, 1e-30, 1e-200])
@pytest.mark.parametrize("variant", ["erm", "sym"])
def test_f_inverse_matches_decimal_reference(n, p, delta, variant):
    expected = reference_f_inverse(n, p, delta, 1, variant)
    assert math.isfinite(expected)
    assert f_inverse(n, p, delta, 1, variant) == pytest.approx(expected, rel=REL)
