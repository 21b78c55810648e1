"""Choosing the test fraction of subagged cross-validation."""
import logging
import math
from typing import Any, Tuple

from app.core.constants import DEFAULT_DRAWS, ENUMERATION_CAP, SELECTION_P_LIMIT
from app.core.exceptions import ConfigurationError, DomainError
from app.models.bounds import BoundValue
from app.models.cv import CvScheme
from app.models.dataset import Dataset
from app.models.loss import LossFunction
from app.models.split import SelectionVariant, SplitRow, SplitTable
from app.services.bounds import (
    NEG_INF,
    log_hoeffding,
    log_vc_test,
    log_vc_train,
    logsumexp,
    pick_branch,
)
from app.services.learners import BaseLearner
from app.services.subagging import Evaluation, SubaggingService
from app.utils.batch_processor import parallel_map
from app.utils.seeding import derive_seed

logger = logging.getLogger(__name__)


def _check(n: int, p: float, vc: int) -> None:
    if n < 1 or not 0.0 < p < 1.0 or vc < 1:
        raise DomainError(f"need n >= 1, 0 < p < 1 and vc >= 1, got n={n}, p={p}, vc={vc}")


def _log_train_factor(n: int, p: float, vc: int) -> float:
    """ln of (2n(1 - p) + 1)^(4 V_C / (1 - p))."""
    return 4.0 * vc * math.log(2.0 * n * (1.0 - p) + 1.0) / (1.0 - p)


def epsilon_threshold(n: int, p: float, vc: int) -> float:
    """eps_n, where the Hoeffding and training-side VC terms cross.

    For p >= 1/18 the Hoeffding term is the smaller one at every eps and
    eps_n is +inf.
    """
    _check(n, p, vc)
    if p >= SELECTION_P_LIMIT:
        return math.inf
    return math.sqrt(4.0 * vc * math.log(2.0 * n * (1.0 - p) + 1.0)
                     / (n * (1.0 - p) * (1.0 / 9.0 - 2.0 * p)))


def log_delta_threshold(n: int, p: float, vc: int, printed: bool = False) -> float:
    """ln delta_n; -inf for p >= 1/18.

    The default is the branch crossover exp(-2np eps_n^2); ``printed``
    gives (2n(1-p)+1)^(-4pV_C/((1-p)(1/9-2p))), which equals exp(-np eps_n^2).
    """
    eps_n = epsilon_threshold(n, p, vc)
    if math.isinf(eps_n):
        return NEG_INF
    exponent = n * p * eps_n * eps_n
    return -exponent if printed else -2.0 * exponent


def delta_threshold(n: int, p: float, vc: int, printed: bool = False) -> float:
    log_delta = log_delta_threshold(n, p, vc, printed)
    return 0.0 if log_delta == NEG_INF else math.exp(log_delta)


def _f_inverse(n: int, p: float, log_delta: float, vc: int,
               variant: SelectionVariant) -> Tuple[float, str]:
    _check(n, p, vc)
    if math.isnan(log_delta) or log_delta > 0 or log_delta == NEG_INF:
        raise DomainError(f"delta must lie in (0, 1], got exp({log_delta})")
    hoeffding = math.sqrt(-log_delta / (2.0 * n * p))

    if variant == "erm":
        if log_delta >= log_delta_threshold(n, p, vc):
            return hoeffding, "hoeffding"
        return 3.0 * math.sqrt((_log_train_factor(n, p, vc) - log_delta) / n), "vc_train"
    if variant == "sym":
        vc_test = math.sqrt(((4.0 * vc / p) * math.log(2.0 * n * p + 1.0) - log_delta) / n)
        return (hoeffding, "hoeffding") if hoeffding <= vc_test else (vc_test, "vc_test")
    raise ConfigurationError(f"unknown selection variant {variant!r}")


def f_inverse_log(n: int, p: float, log_delta: float, vc: int,
                  variant: SelectionVariant = "erm") -> float:
    """f(n, p, delta) from ln delta, so deltas below double precision still invert."""
    return _f_inverse(n, p, log_delta, vc, variant)[0]


def f_inverse(n: int, p: float, delta: float, vc: int,
              variant: SelectionVariant = "erm") -> float:
    """The eps at which min(B, V)(n, p, eps) = delta.

    erm: sqrt(ln(1/delta)/(2np)) when delta >= delta_n, else
    3 sqrt((4 V_C ln(2n(1-p)+1)/(1-p) + ln(1/delta))/n).
    """
    if not 0.0 < delta <= 1.0:
        raise DomainError(f"delta must lie in (0, 1], got {delta}")
    return f_inverse_log(n, p, math.log(delta), vc, variant)


def selection_delta(n: int, p: float, eta: float, vc: int,
                    variant: SelectionVariant = "erm") -> BoundValue:
    """delta_{n,k} = min(B, V)(n, p, eta) for the pair that f inverts."""
    _check(n, p, vc)
    if variant == "erm":
        return pick_branch([("hoeffding", log_hoeffding(n, p, eta)),
                            ("vc_train", log_vc_train(n, p, eta, vc, scale=9.0))])
    if variant == "sym":
        return pick_branch([("vc_test", log_vc_test(n, p, eta, vc)),
                            ("hoeffding", log_hoeffding(n, p, eta))])
    raise ConfigurationError(f"unknown selection variant {variant!r}")


class SplitSelectionService:
    """Builds the per-k selection table and chooses the test size.

    Rows are computed on ``threads`` workers; each k draws its own seed, so
    the table does not depend on ``threads``.
    """

    def __init__(self, threads: int = 1, show_progress: bool = False):
        self.threads = threads
        self.show_progress = show_progress
        self.subagging = SubaggingService()

    def _row(self, learner: BaseLearner, data: Dataset, k: int, eta: float, vc: int,
             variant: SelectionVariant, evaluation: Evaluation, seed: int,
             max_enum: int, draws: int) -> SplitRow:
        n = data.n
        p = k / n
        scheme = CvScheme.leave_out(n, k, seed=derive_seed(seed, k), max_enum=max_enum,
                                    draws=draws)
        estimate = self.subagging.estimate(learner, data, scheme, ("out",), evaluation)["out"]
        delta = selection_delta(n, p, eta, vc, variant)
        f_value, f_branch = _f_inverse(n, p, delta.log_value, vc, variant)
        return SplitRow(
            k=k,
            p=p,
            r_hat_out=estimate.value,
            exact=estimate.exact,
            delta_nk=delta.value,
            log_delta_nk=delta.log_value,
            f_value=f_value,
            f_branch=f_branch,
            objective=estimate.value + f_value,
        )

    def select(
        self,
        learner: BaseLearner,
        data: Dataset,
        eta: float,
        vc: int,
        variant: SelectionVariant = "erm",
        evaluation: Evaluation = LossFunction(),
        seed: int = 0,
        max_enum: int = ENUMERATION_CAP,
        draws: int = DEFAULT_DRAWS,
    ) -> SplitTable:
        """Table of R_CV^Out(k/n) + f(n, k/n, delta_{n,k}) over k = 1..n-1 and its argmin."""
        if data.n < 3:
            raise DomainError(f"split selection needs n >= 3, got {data.n}")
        if not eta > 0:
            raise DomainError(f"eta must be positive, got {eta}")

        rows = parallel_map(
            lambda k: self._row(learner, data, k, eta, vc, variant, evaluation, seed,
                                max_enum, draws),
            range(1, data.n),
            threads=self.threads,
            description="Split rows",
            show_progress=self.show_progress,
        )
        best = rows[0]
        for row in rows[1:]:
            if row.objective < best.objective:
                best = row
        logger.info(f"Selected k*={best.k} (p*={best.p:.4f}) for n={data.n}, eta={eta}")
        return SplitTable(rows=tuple(rows), k_star=best.k, p_star=best.p, eta=eta, vc=vc,
                          variant=variant)


def select_split(
    learner: BaseLearner,
    data: Dataset,
    eta: float,
    vc: int,
    threads: int = 1,
    show_progress: bool = False,
    **options: Any,
) -> SplitTable:
    """Table of R_CV^Out(k/n) + f(n, k/n, delta_{n,k}) over k = 1..n-1 and its argmin.

    ``options`` are the keyword arguments of ``SplitSelectionService.select``.
    """
    service = SplitSelectionService(threads=threads, show_progress=show_progress)
    return service.select(learner, data, eta, vc, **options)


def selection_union_bound(n: int, eta: float, vc: int,
                          variant: SelectionVariant = "erm") -> float:
    """sum over k of min(B, V)(n, k/n, eta), clamped to 1."""
    if n < 2 or not eta > 0:
        raise DomainError(f"need n >= 2 and eta > 0, got n={n}, eta={eta}")
    logs = [selection_delta(n, k / n, eta, vc, variant).log_value for k in range(1, n)]
    total = logsumexp(*logs)
    return 1.0 if total >= 0 else math.exp(total)


def selection_rate_envelope(n: int, eta: float, vc: int) -> float:
    """(n+1)^(8V_C) exp(-2n(eta - 2 sqrt(2) sqrt(V_C ln n / n))^2) / (1 - exp(-2 eta^2)).

    Reporting only; 1 when eta does not exceed the shift.
    """
    if n < 2 or not eta > 0 or vc < 1:
        raise DomainError(f"need n >= 2, eta > 0 and vc >= 1, got n={n}, eta={eta}, vc={vc}")
    shift = 2.0 * math.sqrt(2.0) * math.sqrt(vc * math.log(n) / n)
    if eta <= shift:
        return 1.0
    log_value = (8.0 * vc * math.log(n + 1.0) - 2.0 * n * (eta - shift) ** 2
                 - math.log(-math.expm1(-2.0 * eta * eta)))
    return 1.0 if log_value >= 0 else math.exp(log_value)
