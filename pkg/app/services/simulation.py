"""Synthetic data and Monte Carlo coverage experiments."""
import logging
import math
import time
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy.stats import norm

from app.core.constants import (
    DEFAULT_GHOST_SIZE,
    DEFAULT_REPLICATES,
    MAX_SIMULATION_N,
    MIN_GHOST_SIZE,
    MIN_REPLICATES,
)
from app.core.exceptions import ConfigurationError, DomainError
from app.models.bounds import BoundSpec
from app.models.cv import CvScheme
from app.models.dataset import Dataset
from app.models.loss import LossFunction
from app.models.simulation import (
    CoverageReport,
    CoverageRow,
    DeviationKind,
    L1Report,
    SyntheticDistribution,
)
from app.services.bounds import evaluate_grid, l1_bound
from app.services.learners import BaseLearner
from app.services.subagging import SubaggingService, estimate_from_ensemble, true_risk
from app.utils.batch_processor import parallel_map
from app.utils.seeding import derive_seed

logger = logging.getLogger(__name__)

BINARY_LABELS = (1, 2)

# Deviation each bound variant controls when none is given explicitly
DEFAULT_DEVIATION: Dict[str, DeviationKind] = {
    "bsym-in": "in",
    "sym-in": "in",
    "half-out": "half-out",
    "erm-half": "half-out",
    "maj": "maj",
    "binary-half": "binary-half",
    "binary-maj": "binary-maj",
    "binary-abs": "binary-abs",
}


def bayes_risk(dist: SyntheticDistribution) -> float:
    """Optimal risk: zero-one for the classification kinds, clipped squared for regression."""
    if dist.kind == "constant":
        return 0.0
    if dist.kind in ("threshold-noise", "interval-noise"):
        return min(dist.flip, 1.0 - dist.flip)
    c = 1.0 / dist.sigma
    tail = norm.sf(c)
    inside = (1.0 - 2.0 * tail) - 2.0 * c * norm.pdf(c)
    return float(dist.sigma ** 2 * inside + 2.0 * tail)


def bayes_predict(dist: SyntheticDistribution, x: np.ndarray) -> np.ndarray:
    """The Bayes rule of ``dist`` on features ``x``."""
    column = np.asarray(x, dtype=float).reshape(len(x), -1)[:, 0]
    if dist.kind == "constant":
        return np.ones(len(column), dtype=np.int64)
    if dist.kind == "gaussian-regression":
        return column
    if dist.kind == "threshold-noise":
        clean = column > dist.theta
    else:
        clean = (column > dist.lower) & (column <= dist.upper)
    if dist.flip > 0.5:
        clean = ~clean
    return np.where(clean, 2, 1)


def generate(dist: SyntheticDistribution, n: int, seed: int) -> Dataset:
    """n i.i.d. draws, reproducible per seed."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    rng = np.random.default_rng(seed)
    x = rng.random(n)

    if dist.kind == "gaussian-regression":
        y = x + dist.sigma * rng.standard_normal(n)
        return Dataset(x=x, y=y, task="regression")
    if dist.kind == "constant":
        return Dataset(x=x, y=np.ones(n, dtype=np.int64), labels=BINARY_LABELS)

    if dist.kind == "threshold-noise":
        clean = x > dist.theta
    else:
        clean = (x > dist.lower) & (x <= dist.upper)
    flipped = rng.random(n) < dist.flip
    y = np.where(clean ^ flipped, 2, 1)
    return Dataset(x=x, y=y, labels=BINARY_LABELS)


def _default_loss(dist: SyntheticDistribution) -> LossFunction:
    if dist.task == "regression":
        return LossFunction(kind="clipped-squared")
    return LossFunction()


def _check_sizes(n: int, replicates: int, ghost_size: int) -> None:
    if replicates < MIN_REPLICATES:
        raise ConfigurationError(f"coverage runs need at least {MIN_REPLICATES} replicates, "
                                 f"got {replicates}")
    if ghost_size < MIN_GHOST_SIZE:
        raise ConfigurationError(f"ghost samples need at least {MIN_GHOST_SIZE} points, "
                                 f"got {ghost_size}")
    if not 2 <= n <= MAX_SIMULATION_N:
        raise ConfigurationError(f"simulated n must lie in [2, {MAX_SIMULATION_N}], got {n}")


def _replicate_scheme(scheme: CvScheme, n: int, seed: int, index: int) -> CvScheme:
    if scheme.n != n:
        raise ConfigurationError(f"scheme is defined over n={scheme.n}, experiment uses n={n}")
    return scheme.model_copy(update={"seed": derive_seed(seed, index, 2)})


def _deviation(kind: DeviationKind, risk: float, out: Optional[float], inside: Optional[float],
               maj: Optional[float], l: Optional[int]) -> float:  # noqa: E741
    if kind == "out":
        return risk - out
    if kind == "in":
        return risk - inside
    if kind == "half-out":
        return risk - 0.5 * out
    if kind == "maj":
        return risk - l * maj
    if kind == "binary-half":
        return (0.5 * out - 0.5) - risk
    if kind == "binary-maj":
        return (l * maj - l + 1) - risk
    return abs(risk - 0.5 * (out - 0.5))


def _bound_spec(bound_variant: str, n: int, scheme: CvScheme, vc: Optional[int],
                bound_params: Dict[str, Any]) -> BoundSpec:
    params = dict(bound_params)
    params.setdefault("p", scheme.test_fraction)
    if scheme.kind == "kfold":
        params.setdefault("k", scheme.k)
    if vc is not None:
        params.setdefault("vc", vc)
    if bound_variant in ("maj", "binary-maj"):
        params.setdefault("l", scheme.support_size // 2 + 1)
    return BoundSpec(variant=bound_variant, n=n, **params)


class SimulationService:
    """Monte Carlo experiments over fresh synthetic datasets.

    Replicates run on ``threads`` workers; each replicate derives its seeds
    from (seed, replicate), so reports do not depend on ``threads``.
    """

    def __init__(self, threads: int = 1, show_progress: bool = False):
        self.threads = threads
        self.show_progress = show_progress
        # Members of one replicate are fitted inline; replicates are the parallel unit
        self.subagging = SubaggingService()

    def _run_replicate(self, dist: SyntheticDistribution, learner: BaseLearner,
                       scheme: CvScheme, n: int, ghost_size: int, seed: int, index: int,
                       deviation: DeviationKind, loss: LossFunction) -> float:
        data = generate(dist, n, derive_seed(seed, index, 0))
        ghost = generate(dist, ghost_size, derive_seed(seed, index, 1))
        aggregation = "majority" if data.task == "classification" else "average"
        ensemble = self.subagging.fit(learner, data, _replicate_scheme(scheme, n, seed, index),
                                      aggregation)
        risk = true_risk(ensemble, ghost, loss).value

        out = inside = maj = None
        count = None
        if deviation == "in":
            inside = estimate_from_ensemble(ensemble, data, "in", loss).value
        elif deviation in ("maj", "binary-maj"):
            estimate = estimate_from_ensemble(ensemble, data, "maj", loss)
            maj, count = estimate.value, estimate.l
        else:
            out = estimate_from_ensemble(ensemble, data, "out", loss).value
        return _deviation(deviation, risk, out, inside, maj, count)

    def _deviations(self, dist: SyntheticDistribution, learner: BaseLearner, scheme: CvScheme,
                    n: int, replicates: int, ghost_size: int, seed: int,
                    deviation: DeviationKind, loss: LossFunction) -> np.ndarray:
        started = time.perf_counter()
        deviations = np.asarray(parallel_map(
            lambda index: self._run_replicate(dist, learner, scheme, n, ghost_size, seed, index,
                                              deviation, loss),
            range(replicates),
            threads=self.threads,
            description="Replicates",
            show_progress=self.show_progress,
        ))
        logger.info(f"{replicates} replicates of the {deviation} deviation in "
                    f"{time.perf_counter() - started:.2f}s")
        return deviations

    def coverage(
        self,
        dist: SyntheticDistribution,
        learner: BaseLearner,
        scheme: CvScheme,
        n: int,
        eps_grid: Sequence[float],
        replicates: int = DEFAULT_REPLICATES,
        ghost_size: int = DEFAULT_GHOST_SIZE,
        seed: int = 0,
        bound_variant: str = "sym",
        deviation: Optional[DeviationKind] = None,
        vc: Optional[int] = None,
        bound_params: Optional[Dict[str, Any]] = None,
        loss: Optional[LossFunction] = None,
        config: Optional[Dict[str, Any]] = None,
    ) -> CoverageReport:
        """Empirical Pr(deviation >= eps) over fresh datasets, paired with a bound."""
        _check_sizes(n, replicates, ghost_size)
        deviation = deviation or DEFAULT_DEVIATION.get(bound_variant, "out")
        loss = loss or _default_loss(dist)
        grid = sorted(float(e) for e in eps_grid)
        spec = _bound_spec(bound_variant, n, scheme, vc, bound_params or {})
        exact_scheme = scheme.kind in ("kfold", "holdout") or (
            scheme.kind in ("loo", "lpo") and scheme.support_size <= scheme.max_enum)

        deviations = self._deviations(dist, learner, scheme, n, replicates, ghost_size, seed,
                                      deviation, loss)

        ghost_slack = 3.0 / (2.0 * math.sqrt(ghost_size))
        rows: List[CoverageRow] = []
        for eps, bound in zip(grid, evaluate_grid(spec, grid)):
            freq = float(np.mean(deviations >= eps))
            confident = float(np.mean(deviations >= eps + ghost_slack))
            slack = 3.0 * math.sqrt(freq * (1.0 - freq) / replicates)
            rows.append(CoverageRow(
                eps=eps,
                freq=freq,
                bound=bound.value,
                branch=bound.branch,
                margin=bound.value - freq,
                slack=slack,
                violation=confident > bound.value + slack,
            ))

        notes = () if exact_scheme else ("approximate scheme: sampled training vectors",)
        return CoverageReport(
            config=config or {},
            replicates=replicates,
            ghost_size=ghost_size,
            seed=seed,
            deviation=deviation,
            bound_variant=bound_variant,
            exact_scheme=exact_scheme,
            mean_deviation=float(np.mean(deviations)),
            ghost_slack=ghost_slack,
            rows=tuple(rows),
            notes=notes,
        )

    def l1(
        self,
        dist: SyntheticDistribution,
        learner: BaseLearner,
        scheme: CvScheme,
        n: int,
        replicates: int = DEFAULT_REPLICATES,
        ghost_size: int = DEFAULT_GHOST_SIZE,
        seed: int = 0,
        vc: Optional[int] = None,
        loss: Optional[LossFunction] = None,
        config: Optional[Dict[str, Any]] = None,
    ) -> L1Report:
        """Mean and standard error of R_tilde - R_CV^Out against sqrt(1/(np))."""
        _check_sizes(n, replicates, ghost_size)
        loss = loss or _default_loss(dist)
        deviations = self._deviations(dist, learner, scheme, n, replicates, ghost_size, seed,
                                      "out", loss)

        p = scheme.test_fraction
        mean = float(np.mean(deviations))
        standard_error = float(np.std(deviations, ddof=1) / math.sqrt(replicates))
        bound = l1_bound(n, p)
        erm_bound = l1_bound(n, p, vc=vc, erm=True) if vc is not None else None
        limit = bound if erm_bound is None else min(bound, erm_bound)
        return L1Report(
            config=config or {},
            replicates=replicates,
            ghost_size=ghost_size,
            seed=seed,
            mean=mean,
            standard_error=standard_error,
            bound=bound,
            erm_bound=erm_bound,
            holds=mean + 3.0 * standard_error <= limit,
        )


def coverage_experiment(
    dist: SyntheticDistribution,
    learner: BaseLearner,
    scheme: CvScheme,
    n: int,
    eps_grid: Sequence[float],
    threads: int = 1,
    show_progress: bool = False,
    **options: Any,
) -> CoverageReport:
    """Empirical Pr(deviation >= eps) over fresh datasets, paired with a bound.

    ``options`` are the keyword arguments of ``SimulationService.coverage``.
    """
    service = SimulationService(threads=threads, show_progress=show_progress)
    return service.coverage(dist, learner, scheme, n, eps_grid, **options)


def l1_experiment(
    dist: SyntheticDistribution,
    learner: BaseLearner,
    scheme: CvScheme,
    n: int,
    threads: int = 1,
    show_progress: bool = False,
    **options: Any,
) -> L1Report:
    """Mean and standard error of R_tilde - R_CV^Out against sqrt(1/(np))."""
    service = SimulationService(threads=threads, show_progress=show_progress)
    return service.l1(dist, learner, scheme, n, **options)
