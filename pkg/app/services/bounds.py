"""Concentration and expectation bounds, evaluated in natural-log domain.

Polynomial VC factors such as (2np + 1)^(4 V_C / p) overflow double
precision at moderate sizes, so every term is combined as a logarithm and
exponentiated once, after the minimum over branches.
"""
import logging
import math
import sys
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from app.core.exceptions import ConfigurationError, DomainError
from app.models.bounds import BoundSpec, BoundValue

logger = logging.getLogger(__name__)

NEG_INF = float("-inf")
LOG_FLOAT_MAX = math.log(sys.float_info.max)

CLASSIFIER_VARIANTS = ("half-out", "maj", "binary-half", "binary-maj", "erm-half", "binary-abs")


def _log(x: float) -> float:
    return math.log(x) if x > 0 else NEG_INF


def logsumexp(*terms: float) -> float:
    return float(np.logaddexp.reduce(np.asarray(terms, dtype=float)))


def pick_branch(terms: Sequence[Tuple[str, float]], notes: Iterable[str] = ()) -> BoundValue:
    """Smallest log term, first branch on ties, clamped once at the boundary."""
    branch, log_value = terms[0]
    for name, value in terms[1:]:
        if value < log_value:
            branch, log_value = name, value
    value = 1.0 if log_value >= 0 else math.exp(log_value)
    return BoundValue(value=value, log_value=log_value, branch=branch, notes=tuple(notes))


def _check(n: int, p: Optional[float] = None, eps: float = 0.0, vc: Optional[int] = None) -> None:
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    if p is not None and not 0.0 < p < 1.0:
        raise DomainError(f"test fraction must lie in (0, 1), got {p}")
    if not eps >= 0.0:
        raise DomainError(f"eps must be nonnegative, got {eps}")
    if vc is not None and vc < 1:
        raise DomainError(f"VC dimension must be at least 1, got {vc}")


# Log terms shared by several theorems

def log_hoeffding(n: int, p: float, eps: float) -> float:
    return -2.0 * n * p * eps * eps


def log_vc_test(n: int, p: float, eps: float, vc: int) -> float:
    return (4.0 * vc / p) * math.log(2.0 * n * p + 1.0) - n * eps * eps


def log_vc_train(n: int, p: float, eps: float, vc: int, scale: float = 1.0) -> float:
    """(4 V_C / (1 - p)) ln(2n(1 - p) + 1) - n eps^2 / scale."""
    q = 1.0 - p
    return (4.0 * vc / q) * math.log(2.0 * n * q + 1.0) - n * eps * eps / scale


def v_sym(n: int, p: float, eps: float) -> BoundValue:
    """exp(-2 n p eps^2)."""
    _check(n, p, eps)
    return pick_branch([("hoeffding", log_hoeffding(n, p, eps))])


def b_sym_out(n: int, p: float, eps: float, vc: int) -> BoundValue:
    """(2np + 1)^(4 V_C / p) exp(-n eps^2)."""
    _check(n, p, eps, vc)
    return pick_branch([("vc_test", log_vc_test(n, p, eps, vc))])


def b_sym_in(n: int, p: float, eps: float, vc: int) -> BoundValue:
    """(2n(1 - p) + 1)^(4 V_C / (1 - p)) exp(-n eps^2)."""
    _check(n, p, eps, vc)
    return pick_branch([("vc_train", log_vc_train(n, p, eps, vc))])


def sym_bound(n: int, p: float, eps: float, vc: int) -> BoundValue:
    """min(B_sym, V_sym) for the out-sample estimate."""
    _check(n, p, eps, vc)
    return pick_branch([("vc_test", log_vc_test(n, p, eps, vc)),
                        ("hoeffding", log_hoeffding(n, p, eps))])


def sym_in_bound(n: int, p: float, eps: float, vc: int) -> BoundValue:
    """min(B_sym, V_sym) for the in-sample estimate."""
    _check(n, p, eps, vc)
    return pick_branch([("vc_train", log_vc_train(n, p, eps, vc)),
                        ("hoeffding", log_hoeffding(n, p, eps))])


def bound_erm(n: int, p: float, eps: float, vc: int) -> BoundValue:
    """min(V_ERM, B_ERM): Hoeffding, the test-side VC term and the training-side term."""
    _check(n, p, eps, vc)
    return pick_branch([
        ("hoeffding", log_hoeffding(n, p, eps)),
        ("vc_test", log_vc_test(n, p, eps, vc)),
        ("vc_train", log_vc_train(n, p, eps, vc, scale=9.0)),
    ])


def bound_kfold(n: int, k: int, eps: float, vc: int) -> BoundValue:
    """min(B_k, V_k) for k-fold cross-validation with k dividing n."""
    _check(n, None, eps, vc)
    if k < 2 or n % k:
        raise DomainError(f"k-fold bounds need 2 <= k and k | n, got n={n}, k={k}")
    fold = n / k
    denominator = 64.0 * (math.sqrt(vc * math.log(2.0 * (2.0 * fold + 1.0))) + 2.0)
    return pick_branch(
        [
            ("vc", 4.0 * k * vc * math.log(2.0 * fold + 1.0) - n * eps * eps),
            ("hoeffding", v_sym(n, 1.0 / k, eps).log_value),
            ("vc_hoeffding", k * math.log(2.0) - n * eps * eps / denominator),
        ],
        notes=("vc_hoeffding denominator 64(sqrt(V_C ln(2(2n/k+1))) + 2) evaluated as printed",),
    )


def l1_bound(n: int, p: float, vc: Optional[int] = None, erm: bool = False) -> float:
    """Bound on E(R_tilde - R_CV^Out): sqrt(1/(np)), or the ERM minimum."""
    if n < 1 or not 0.0 < p <= 1.0:
        raise DomainError(f"l1 bound needs n >= 1 and p in (0, 1], got n={n}, p={p}")
    generic = math.sqrt(1.0 / (n * p))
    if not erm:
        return generic
    if vc is None or vc < 1:
        raise DomainError("the ERM l1 bound needs a VC dimension")
    if p >= 1.0:
        return generic
    train = n * (1.0 - p)
    return min(generic, 6.0 * math.sqrt(vc * (math.log(train) + 2.0) / train))


def stability_l1_bound(n: int, p: float, lam: float, delta: float) -> BoundValue:
    """Bound on E(R_tilde - R_CV^Out) for a weakly (lam, delta)-stable learner.

    min(sqrt(1/(np)), sqrt(16^3 n) lam p + n/(4 lam p) delta) under the
    uniform distance; lam = 0 leaves only the generic branch.
    """
    _check(n, p)
    _check_stability(lam, delta)
    generic = ("generic", -0.5 * (math.log(n) + math.log(p)))
    if lam == 0:
        return pick_branch([generic], notes=("lambda=0: stability branch unavailable",))
    log_lam_p = math.log(lam) + math.log(p)
    spread = 0.5 * (3.0 * math.log(16.0) + math.log(n)) + log_lam_p
    failure = math.log(n) - math.log(4.0) - log_lam_p + _log(delta)
    return pick_branch([generic, ("stability", logsumexp(spread, failure))],
                       notes=("expectation bound, clamped at 1",))


def expectation_from_tail(c: float, kappa: float) -> float:
    """E X <= sqrt((ln C + 2) / K) when P(X >= eps) <= C exp(-K eps^2)."""
    if c < 1.0 or kappa <= 0.0:
        raise DomainError(f"need c >= 1 and kappa > 0, got c={c}, kappa={kappa}")
    return math.sqrt((math.log(c) + 2.0) / kappa)


def _exp_capped(log_value: float) -> float:
    """exp(log_value), +inf past double range."""
    return math.inf if log_value > LOG_FLOAT_MAX else math.exp(log_value)


def _log_ratio_term(log_numerator: float, log_denominator: float) -> float:
    """numerator / denominator from their logs; 0 when the numerator is 0."""
    if log_numerator == NEG_INF:
        return 0.0
    return _exp_capped(log_numerator - log_denominator)


def stability_strong_bound(n: int, p: float, eps: float, lam: float, delta_stab: float,
                           alpha: Optional[float] = None) -> BoundValue:
    """Hoeffding versus the strong-stability (Kutin) branch.

    Without ``alpha`` the simplified form 2(exp(-eps^2/(8(16 lam)^2 n p^2))
    + n/(8 lam p) delta) is evaluated; with ``alpha`` the general form
    2(exp(-eps^2/(8n(8 lam n p + alpha)^2)) + (n/alpha) delta).
    """
    _check(n, p, eps)
    _check_stability(lam, delta_stab)
    hoeffding = ("hoeffding", log_hoeffding(n, p, eps))
    if lam == 0:
        return pick_branch([hoeffding], notes=("lambda=0: stability branch unavailable",))

    log_eps_sq = 2.0 * _log(eps)
    if alpha is None:
        log_scale = (math.log(8.0) + 2.0 * (math.log(16.0) + math.log(lam)) + math.log(n)
                     + 2.0 * math.log(p))
        failure = math.log(n) - math.log(8.0) - math.log(lam) - math.log(p) + _log(delta_stab)
        notes = ("simplified form with alpha = 8 lambda n p",)
    else:
        if alpha <= 0:
            raise DomainError(f"alpha must be positive, got {alpha}")
        log_scale = math.log(8.0) + math.log(n) + 2.0 * math.log(8.0 * lam * n * p + alpha)
        failure = math.log(n) - math.log(alpha) + _log(delta_stab)
        notes = ()
    exponent = -_log_ratio_term(log_eps_sq, log_scale)
    kutin = math.log(2.0) + logsumexp(exponent, failure)
    return pick_branch([hoeffding, ("kutin", kutin)], notes=notes)


def stability_weak_bound(n: int, p: float, eps: float, lam: float,
                         delta_stab: float) -> BoundValue:
    """Hoeffding versus the weak-stability branch under the uniform distance.

    The stability branch is 2(exp(-n eps^2/(10 a^2)) + (n sqrt(delta)/(9 lam p))
    exp(eps n/(4 a^2))) + n sqrt(delta) with a = 9 lam n p; its delta terms
    grow with eps.
    """
    _check(n, p, eps)
    _check_stability(lam, delta_stab)
    hoeffding = ("hoeffding", log_hoeffding(n, p, eps))
    if lam == 0:
        return pick_branch([hoeffding], notes=("lambda=0: stability branch unavailable",))

    log_a = math.log(9.0) + math.log(lam) + math.log(n) + math.log(p)
    log_root_delta = 0.5 * _log(delta_stab)
    decay = -_log_ratio_term(math.log(n) + 2.0 * _log(eps), math.log(10.0) + 2.0 * log_a)
    if log_root_delta == NEG_INF:
        growth = NEG_INF
    else:
        growth = (math.log(n) + log_root_delta - math.log(9.0) - math.log(lam) - math.log(p)
                  + _log_ratio_term(_log(eps) + math.log(n), math.log(4.0) + 2.0 * log_a))
    weak = logsumexp(math.log(2.0) + logsumexp(decay, growth), math.log(n) + log_root_delta)
    return pick_branch([hoeffding, ("kutin_weak", weak)],
                       notes=("grouping 2(exp(.) + c exp(.)) + n sqrt(delta)",))


def _check_stability(lam: float, delta_stab: float) -> None:
    if not lam >= 0 or math.isinf(lam):
        raise DomainError(f"lambda must be finite and nonnegative, got {lam}")
    if not 0.0 <= delta_stab <= 1.0:
        raise DomainError(f"stability failure probability must lie in [0, 1], got {delta_stab}")


def kutin_strong_tail(n: int, b: float, c: float, delta: float, alpha: float,
                      tau: float) -> float:
    """2(exp(-tau^2/(8n(c + b alpha)^2)) + (n/alpha) delta), clamped to [0, 1]."""
    if not b >= c >= 0 or alpha <= 0 or c + b * alpha <= 0:
        raise DomainError(f"need b >= c >= 0, alpha > 0 and c + b alpha > 0, "
                          f"got b={b}, c={c}, alpha={alpha}")
    if not 0.0 <= delta <= 1.0 or tau < 0 or n < 1:
        raise DomainError(f"invalid tail arguments n={n}, delta={delta}, tau={tau}")
    exponent = -_log_ratio_term(2.0 * _log(tau),
                                math.log(8.0 * n) + 2.0 * math.log(c + b * alpha))
    log_value = math.log(2.0) + logsumexp(exponent,
                                          math.log(n) - math.log(alpha) + _log(delta))
    return 1.0 if log_value >= 0 else math.exp(log_value)


def kutin_weak_tail(n: int, b: float, c: float, delta: float, eps: float) -> float:
    """2exp(-eps^2/(10nc^2(1 + 2eps/(15nc))^2)) + (2nb sqrt(delta)/c) exp(eps b/(4nc^2))
    + 2n sqrt(delta), clamped to [0, 1]."""
    if not b >= c > 0:
        raise DomainError(f"need b >= c > 0, got b={b}, c={c}")
    if not 0.0 <= delta <= 1.0 or eps < 0 or n < 1:
        raise DomainError(f"invalid tail arguments n={n}, delta={delta}, eps={eps}")
    log_root_delta = 0.5 * _log(delta)
    # c (1 + 2eps/(15nc)) = c + 2eps/(15n)
    first = math.log(2.0) - _log_ratio_term(
        2.0 * _log(eps), math.log(10.0 * n) + 2.0 * math.log(c + 2.0 * eps / (15.0 * n)))
    if log_root_delta == NEG_INF:
        second = NEG_INF
    else:
        second = (math.log(2.0 * n) + math.log(b) + log_root_delta - math.log(c)
                  + _log_ratio_term(_log(eps) + math.log(b), math.log(4.0 * n) + 2.0 * math.log(c)))
    third = math.log(2.0 * n) + log_root_delta
    log_value = logsumexp(first, second, third)
    return 1.0 if log_value >= 0 else math.exp(log_value)


def classifier_bounds(
    n: int,
    p: float,
    eps: float,
    variant: str,
    l: Optional[int] = None,  # noqa: E741
    vc: Optional[int] = None,
) -> BoundValue:
    """Bounds for subagged classifiers.

    half-out: exp(-8np eps^2/9) on R_tilde - R_out/2;
    maj: l exp(-2np eps^2/9) on R_tilde - l R_maj;
    binary-half: exp(-2np eps^2/9); binary-maj: l exp(-2np eps^2);
    erm-half: min(exp(-8np eps^2/9), (2n(1-p)+1)^(4V_C/(1-p)) exp(-4n(1-p) eps^2));
    binary-abs: 2 exp(-2np eps^2/9) on |R_tilde - (R_out - 1/2)/2|.
    """
    _check(n, p, eps, vc)
    base = n * p * eps * eps
    if variant in ("maj", "binary-maj"):
        if l is None or l < 1:
            raise DomainError(f"variant {variant!r} needs l >= 1")
    if variant == "half-out":
        return pick_branch([("half_out", -8.0 * base / 9.0)])
    if variant == "maj":
        return pick_branch([("maj", math.log(l) - 2.0 * base / 9.0)])
    if variant == "binary-half":
        return pick_branch([("binary_half", -2.0 * base / 9.0)])
    if variant == "binary-maj":
        return pick_branch([("binary_maj", math.log(l) - 2.0 * base)])
    if variant == "binary-abs":
        return pick_branch([("binary_abs", math.log(2.0) - 2.0 * base / 9.0)])
    if variant == "erm-half":
        if vc is None:
            raise DomainError("variant 'erm-half' needs a VC dimension")
        q = 1.0 - p
        vc_term = (4.0 * vc / q) * math.log(2.0 * n * q + 1.0) - 4.0 * n * q * eps * eps
        return pick_branch([("half_out", -8.0 * base / 9.0), ("vc_train", vc_term)])
    raise ConfigurationError(f"unknown classifier bound variant {variant!r}")


def weak_to_strong_delta(delta: float, support_size: int) -> float:
    """A weakly (lambda, delta)-stable learner is strongly (lambda, kappa(n) delta)-stable."""
    if support_size < 1 or not 0.0 <= delta <= 1.0:
        raise DomainError(f"need support size >= 1 and delta in [0, 1], "
                          f"got {support_size}, {delta}")
    return min(1.0, support_size * delta)


def _tail_value(value: float) -> BoundValue:
    return BoundValue(value=value, log_value=_log(value), branch="kutin")


def evaluate_bound(spec: BoundSpec) -> BoundValue:
    """Evaluate the bound named by ``spec.variant`` at ``spec.eps``."""
    v = spec.variant
    if v == "vsym":
        return v_sym(spec.n, spec.p, spec.eps)
    if v == "bsym-out":
        return b_sym_out(spec.n, spec.p, spec.eps, spec.vc)
    if v == "bsym-in":
        return b_sym_in(spec.n, spec.p, spec.eps, spec.vc)
    if v == "sym":
        return sym_bound(spec.n, spec.p, spec.eps, spec.vc)
    if v == "sym-in":
        return sym_in_bound(spec.n, spec.p, spec.eps, spec.vc)
    if v == "erm":
        return bound_erm(spec.n, spec.p, spec.eps, spec.vc)
    if v == "kfold":
        return bound_kfold(spec.n, spec.k, spec.eps, spec.vc)
    if v == "stab-strong":
        return stability_strong_bound(spec.n, spec.p, spec.eps, spec.lam, spec.delta_stab,
                                      spec.alpha)
    if v == "stab-weak":
        return stability_weak_bound(spec.n, spec.p, spec.eps, spec.lam, spec.delta_stab)
    if v == "kutin-strong":
        return _tail_value(kutin_strong_tail(spec.n, spec.b, spec.c, spec.delta_stab,
                                             spec.alpha, spec.eps))
    if v == "kutin-weak":
        return _tail_value(kutin_weak_tail(spec.n, spec.b, spec.c, spec.delta_stab, spec.eps))
    if v in CLASSIFIER_VARIANTS:
        return classifier_bounds(spec.n, spec.p, spec.eps, v, l=spec.l, vc=spec.vc)
    raise ConfigurationError(f"unknown bound variant {v!r}")


def evaluate_grid(spec: BoundSpec, eps_grid: Sequence[float]) -> List[BoundValue]:
    """Bound values over an ascending eps grid, with a running minimum.

    A tail probability is nonincreasing in eps, so the running minimum is
    still a valid bound; it only changes the variants whose failure terms
    grow with eps.
    """
    grid = [float(e) for e in eps_grid]
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise DomainError("eps grid must be ascending")

    values: List[BoundValue] = []
    for eps in grid:
        current = evaluate_bound(spec.with_eps(eps))
        if values and values[-1].log_value < current.log_value:
            previous = values[-1]
            notes = previous.notes if "running minimum" in previous.notes else \
                previous.notes + ("running minimum",)
            current = previous.model_copy(update={"notes": notes})
        values.append(current)
    logger.debug(f"Evaluated {spec.variant} on {len(grid)} grid points")
    return values
