"""Command dispatch: a validated RunConfig in, artifacts and an exit status out."""
import json
import logging
import sys
import time
from typing import Any, Callable, Dict, List, Optional, TextIO, Tuple

from app.core.constants import EXIT_OK, EXIT_VIOLATION
from app.core.exceptions import ConfigurationError
from app.models.bounds import BoundSpec
from app.models.cv import CvScheme
from app.models.dataset import Dataset
from app.models.learner import HypothesisClass
from app.models.loss import ConvexSurrogate, LossFunction
from app.repositories.dataset_repository import DatasetRepository
from app.repositories.ensemble_repository import EnsembleRepository
from app.repositories.report_repository import ReportWriter
from app.schemas.run_config import (
    DatasetConfig,
    LearnerConfig,
    RunConfig,
    SchemeConfig,
)
from app.services.bounds import evaluate_grid
from app.services.learners import (
    BaseLearner,
    ErmLearner,
    KnnLearner,
    max_shatter,
    shatter_coefficient,
    vc_lower_bound,
)
from app.services.majority_oracle import majority_inequality_oracle
from app.services.simulation import SimulationService, generate
from app.services.split_select import SplitSelectionService
from app.services.subagging import SubaggingService, aggregate_predict, estimate_from_ensemble
from app.utils.data_parser import parse_eps_grid
from app.utils.seeding import derive_seed

logger = logging.getLogger(__name__)


def build_learner(cfg: LearnerConfig) -> BaseLearner:
    if cfg.learner == "knn":
        return KnnLearner(cfg.k)
    hclass = HypothesisClass(kind=cfg.hypothesis_class, feature=cfg.feature,
                             two_sided=cfg.two_sided, bins=cfg.bins, low=cfg.low, high=cfg.high)
    if cfg.objective == "zero-one":
        objective = LossFunction()
    else:
        objective = ConvexSurrogate(c_kind=cfg.objective, clamp=cfg.clamp)
    return ErmLearner(hclass, objective)


def build_scheme(cfg: SchemeConfig, n: int, seed: int) -> CvScheme:
    return CvScheme(kind=cfg.kind, n=n, k=cfg.k, v=cfg.v, p=cfg.p, draws=cfg.draws,
                    seed=seed, max_enum=cfg.max_enum)


def load_dataset(cfg: DatasetConfig, seed: int) -> Dataset:
    if cfg.synthetic is not None:
        return generate(cfg.synthetic, cfg.n, derive_seed(seed, 0))
    return DatasetRepository().read(cfg.path, task=cfg.task, labels=cfg.labels)


def _eps_grid(eps) -> List[float]:
    return [float(eps)] if isinstance(eps, (int, float)) else parse_eps_grid(eps)


def _bound_spec(config: RunConfig) -> BoundSpec:
    cfg = config.bounds
    return BoundSpec(variant=cfg.variant, n=cfg.n, p=cfg.p, vc=cfg.vc, k=cfg.k, lam=cfg.lam,
                     delta_stab=cfg.delta, alpha=cfg.alpha, l=cfg.l, b=cfg.b, c=cfg.c)


Outcome = Tuple[Any, List[Dict[str, Any]], List[str], Dict[str, Any], bool]


class CommandRunner:
    """Runs one command and writes its artifact.

    Every handler returns (json result, csv rows, csv columns, extra csv
    header lines, violation flag).
    """

    def __init__(self, config: RunConfig, stream: Optional[TextIO] = None):
        self.config = config
        self.writer = ReportWriter(config.output, stream=stream)
        self.show_progress = not config.quiet and sys.stderr.isatty()
        self.subagging = SubaggingService(config.threads, self.show_progress)
        self.simulation = SimulationService(config.threads, self.show_progress)
        self.split_selection = SplitSelectionService(config.threads, self.show_progress)
        self._handlers: Dict[str, Callable[[], Optional[Outcome]]] = {
            "bounds": self._bounds,
            "estimate": self._estimate,
            "subag-train": self._subag_train,
            "subag-predict": self._subag_predict,
            "select-split": self._select_split,
            "simulate": self._simulate,
            "oracle-majority": self._oracle_majority,
            "shatter": self._shatter,
            "schema": self._schema,
            "generate": self._generate,
        }

    def run(self) -> int:
        started = time.perf_counter()
        outcome = self._handlers[self.config.command]()
        logger.info(f"{self.config.command} finished in {time.perf_counter() - started:.2f}s")
        if outcome is None:
            return EXIT_OK

        result, rows, columns, extra, violation = outcome
        echo = self.config.echo()
        if self.config.format == "json":
            self.writer.write_json(result, echo)
        else:
            self.writer.write_csv(rows, columns, echo, extra)

        if violation:
            logger.warning(f"{self.config.command}: bound or oracle violation detected")
            # The majority oracle fails on any counterexample; other commands only under --check
            if self.config.check or self.config.command == "oracle-majority":
                return EXIT_VIOLATION
        return EXIT_OK

    def _bounds(self) -> Outcome:
        spec = _bound_spec(self.config)
        grid = _eps_grid(self.config.bounds.eps)
        values = evaluate_grid(spec, grid)
        rows = [{"eps": eps, "value": v.value, "log_value": v.log_value, "branch": v.branch}
                for eps, v in zip(grid, values)]
        notes = sorted({note for v in values for note in v.notes})
        result = {"rows": rows, "notes": notes}
        return result, rows, ["eps", "value", "log_value", "branch"], {}, False

    def _fit(self, data: Dataset):
        learner = build_learner(self.config.learner)
        scheme = build_scheme(self.config.scheme, data.n, derive_seed(self.config.seed, 1))
        return self.subagging.fit(learner, data, scheme, self.config.aggregation)

    def _estimate(self) -> Outcome:
        data = load_dataset(self.config.dataset, self.config.seed)
        ensemble = self._fit(data)
        loss = LossFunction(kind=self.config.estimate.loss)
        estimates = [estimate_from_ensemble(ensemble, data, variant, loss)
                     for variant in self.config.estimate.variants]
        result = [e.to_record() for e in estimates]
        rows = [{"variant": e.variant, "value": e.value, "exact": e.exact,
                 "l": "" if e.l is None else e.l} for e in estimates]
        return result, rows, ["variant", "value", "exact", "l"], {}, False

    def _subag_train(self) -> None:
        data = load_dataset(self.config.dataset, self.config.seed)
        ensemble = self._fit(data)
        echo = self.config.echo()
        repository = EnsembleRepository()
        if self.config.output:
            repository.save(ensemble, self.config.output, config=echo)
        else:
            path = repository.save(ensemble, config=echo)
            summary = {"ensemble": str(path), "members": ensemble.size, "exact": ensemble.exact}
            self.writer.write_text(self.writer.render_json(summary, echo))
        return None

    def _subag_predict(self) -> Outcome:
        ensemble = EnsembleRepository().load(self.config.ensemble)
        queries = DatasetRepository().read_features(self.config.queries)
        predictions = aggregate_predict(ensemble, queries)
        rows = [{"index": i, "prediction": p.item()} for i, p in enumerate(predictions)]
        return rows, rows, ["index", "prediction"], {}, False

    def _select_split(self) -> Outcome:
        data = load_dataset(self.config.dataset, self.config.seed)
        selection = self.config.selection
        scheme = self.config.scheme or SchemeConfig(kind="lpo")
        table = self.split_selection.select(
            build_learner(self.config.learner),
            data,
            eta=selection.eta,
            vc=selection.vc,
            variant=selection.variant,
            seed=derive_seed(self.config.seed, 1),
            max_enum=scheme.max_enum,
            draws=scheme.draws,
        )
        rows = [row.model_dump() for row in table.rows]
        columns = list(rows[0].keys())
        extra = {"k_star": table.k_star, "p_star": table.p_star}
        return table.model_dump(), rows, columns, extra, False

    def _simulate(self) -> Outcome:
        sim = self.config.simulation
        learner = build_learner(self.config.learner)
        scheme = build_scheme(self.config.scheme, sim.n, derive_seed(self.config.seed, 1))
        echo = self.config.echo()
        if sim.experiment == "l1":
            report = self.simulation.l1(sim.distribution, learner, scheme, sim.n,
                                        replicates=sim.replicates, ghost_size=sim.ghost_size,
                                        seed=self.config.seed, vc=sim.vc, config=echo)
            row = report.model_dump(exclude={"config"})
            return report.model_dump(), [row], list(row.keys()), {}, not report.holds

        report = self.simulation.coverage(
            sim.distribution,
            learner,
            scheme,
            sim.n,
            _eps_grid(sim.eps),
            replicates=sim.replicates,
            ghost_size=sim.ghost_size,
            seed=self.config.seed,
            bound_variant=sim.bound_variant,
            deviation=sim.deviation,
            vc=sim.vc,
            bound_params=sim.bound_params,
            config=echo,
        )
        rows = [row.model_dump() for row in report.rows]
        columns = ["eps", "freq", "bound", "branch", "margin", "slack", "violation"]
        extra = {"deviation": report.deviation, "exact_scheme": report.exact_scheme,
                 "mean_deviation": report.mean_deviation}
        return report.model_dump(), rows, columns, extra, bool(report.violations)

    def _oracle_majority(self) -> Outcome:
        verdict = majority_inequality_oracle(self.config.oracle.max_m, self.config.oracle.max_n)
        row = {"passed": verdict.passed, "max_m": verdict.max_m, "max_n": verdict.max_n,
               "matrices_checked": verdict.matrices_checked,
               "counterexample": json.dumps(verdict.counterexample, sort_keys=True)
               if verdict.counterexample else ""}
        return verdict.model_dump(), [row], list(row.keys()), {}, not verdict.passed

    def _shatter(self) -> Outcome:
        cfg = self.config.shatter
        hclass = HypothesisClass(kind=cfg.hypothesis_class, two_sided=cfg.two_sided,
                                 bins=cfg.bins, low=cfg.low, high=cfg.high)
        result: Dict[str, Any] = {
            "class": cfg.hypothesis_class,
            "declared_vc": hclass.declared_vc,
            "vc_lower_bound": vc_lower_bound(hclass, cfg.max_n, seed=self.config.seed),
        }
        if cfg.points is not None:
            result["shatter_coefficient"] = shatter_coefficient(hclass, cfg.points)
        if cfg.m is not None:
            result["max_shatter"] = max_shatter(hclass, cfg.m, seed=self.config.seed)
        return result, [result], list(result.keys()), {}, False

    def _schema(self) -> None:
        self.writer.write_text(json.dumps(RunConfig.model_json_schema(), sort_keys=True,
                                          indent=2) + "\n")
        return None

    def _generate(self) -> None:
        cfg = self.config.dataset
        if cfg.synthetic is None:
            raise ConfigurationError("generate needs a synthetic dataset specification")
        data = load_dataset(cfg, self.config.seed)
        self.writer.write_text(self.writer.render_header(self.config.echo())
                               + DatasetRepository.render(data))
        return None


def run(config: RunConfig, stream: Optional[TextIO] = None) -> int:
    """Execute ``config`` and return the process exit status."""
    return CommandRunner(config, stream=stream).run()
