"""Command-line entry point.

Flags are folded into a RunConfig document (optionally layered over a
--config JSON file), validated, and dispatched by the command runner.
"""
import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from app.core.constants import (
    EXIT_INVALID_CONFIG,
    EXIT_RUNTIME_ERROR,
    TOOL_NAME,
    TOOL_VERSION,
)
from app.core.exceptions import ConfigurationError, SubagError
from app.core.logging_config import setup_logging
from app.schemas.run_config import RunConfig
from app.services.runner import run

logger = logging.getLogger(__name__)

SUPPRESS = argparse.SUPPRESS


def _int_list(value: str) -> List[int]:
    return [int(v) for v in value.split(",") if v.strip()]


def _float_list(value: str) -> List[float]:
    return [float(v) for v in value.split(",") if v.strip()]


def _learner_value(value: str) -> Dict[str, Any]:
    """Learner as a JSON object or a bare name."""
    value = value.strip()
    if value.startswith("{"):
        try:
            return json.loads(value)
        except json.JSONDecodeError as e:
            raise argparse.ArgumentTypeError(f"invalid learner JSON: {e}")
    return {"learner": value}


def _add(parser: argparse.ArgumentParser, flag: str, path: str, **kwargs) -> None:
    """Register an option whose value lands at ``path`` in the RunConfig document."""
    parser.add_argument(flag, dest=f"cfg:{path}", default=SUPPRESS, **kwargs)


def _dataset_options(parser: argparse.ArgumentParser) -> None:
    _add(parser, "--data", "dataset.path", help="CSV with columns x0..x{d-1}, y")
    _add(parser, "--task", "dataset.task", choices=["classification", "regression"])
    _add(parser, "--labels", "dataset.labels", type=_int_list, help="Declared labels, e.g. 1,2")


def _learner_options(parser: argparse.ArgumentParser) -> None:
    _add(parser, "--learner", "learner", type=_learner_value,
         help='erm, knn, or JSON such as {"learner":"knn","k":3}')
    _add(parser, "--class", "learner.class", choices=["stump", "interval", "histogram"])
    _add(parser, "--objective", "learner.objective",
         choices=["zero-one", "hinge", "exponential", "logit"])
    _add(parser, "--neighbors", "learner.k", type=int, help="k for knn")
    _add(parser, "--feature", "learner.feature", type=int)
    _add(parser, "--bins", "learner.bins", type=int)
    parser.add_argument("--one-sided", dest="cfg:learner.two_sided", action="store_false",
                        default=SUPPRESS, help="Stumps as one-directional half-lines")


def _scheme_options(parser: argparse.ArgumentParser) -> None:
    _add(parser, "--scheme", "scheme.kind", choices=["kfold", "loo", "lpo", "holdout", "mc"])
    _add(parser, "--folds", "scheme.k", type=int)
    _add(parser, "--leave-out", "scheme.v", type=int)
    _add(parser, "--test-fraction", "scheme.p", type=float)
    _add(parser, "--draws", "scheme.draws", type=int)
    _add(parser, "--max-enum", "scheme.max_enum", type=int)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="RunConfig JSON file")
    _add(common, "--seed", "seed", type=int)
    _add(common, "--threads", "threads", type=int)
    _add(common, "--output", "output", help="Write the artifact here instead of stdout")
    _add(common, "--format", "format", choices=["csv", "json"])
    common.add_argument("--check", dest="cfg:check", action="store_true", default=SUPPRESS,
                        help="Exit 3 on a bound or oracle violation")
    common.add_argument("--quiet", dest="cfg:quiet", action="store_true", default=SUPPRESS,
                        help="No progress bars")
    common.add_argument("--debug", action="store_true", help="DEBUG logging")

    parser = argparse.ArgumentParser(
        prog="subag",
        description="Subagging with cross-validated risk estimates and concentration bounds",
    )
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {TOOL_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", parents=[common], help="Evaluate a bound over an eps grid")
    _add(p, "--variant", "bounds.variant")
    _add(p, "--n", "bounds.n", type=int)
    _add(p, "--p", "bounds.p", type=float)
    _add(p, "--eps", "bounds.eps", help="Scalar, comma list or start:stop:step")
    _add(p, "--vc", "bounds.vc", type=int)
    _add(p, "--k", "bounds.k", type=int)
    _add(p, "--lambda", "bounds.lambda", type=float)
    _add(p, "--delta", "bounds.delta", type=float)
    _add(p, "--alpha", "bounds.alpha", type=float)
    _add(p, "--l", "bounds.l", type=int)
    _add(p, "--b", "bounds.b", type=float)
    _add(p, "--c", "bounds.c", type=float)

    p = sub.add_parser("estimate", parents=[common], help="Cross-validated subagged risk")
    _dataset_options(p)
    _learner_options(p)
    _scheme_options(p)
    _add(p, "--variant", "estimate.variants", choices=["out", "in", "maj", "all"])
    _add(p, "--loss", "estimate.loss",
         choices=["zero-one", "clipped-absolute", "clipped-squared"])
    _add(p, "--aggregation", "aggregation", choices=["average", "majority"])

    p = sub.add_parser("subag-train", parents=[common], help="Fit and store an ensemble")
    _dataset_options(p)
    _learner_options(p)
    _scheme_options(p)
    _add(p, "--aggregation", "aggregation", choices=["average", "majority"])

    p = sub.add_parser("subag-predict", parents=[common], help="Predict with a stored ensemble")
    _add(p, "--ensemble", "ensemble", help="Ensemble JSON from subag-train")
    _add(p, "--queries", "queries", help="CSV with columns x0..x{d-1}")

    p = sub.add_parser("select-split", parents=[common], help="Choose the test fraction")
    _dataset_options(p)
    _learner_options(p)
    _add(p, "--eta", "selection.eta", type=float)
    _add(p, "--vc", "selection.vc", type=int)
    _add(p, "--variant", "selection.variant", choices=["erm", "sym"])
    _add(p, "--draws", "scheme.draws", type=int)
    _add(p, "--max-enum", "scheme.max_enum", type=int)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo coverage experiment")
    _learner_options(p)
    _scheme_options(p)
    _add(p, "--experiment", "simulation.experiment", choices=["coverage", "l1"])
    _add(p, "--dist", "simulation.distribution.kind",
         choices=["threshold-noise", "interval-noise", "gaussian-regression", "constant"])
    _add(p, "--flip", "simulation.distribution.flip", type=float)
    _add(p, "--theta", "simulation.distribution.theta", type=float)
    _add(p, "--n", "simulation.n", type=int)
    _add(p, "--eps", "simulation.eps")
    _add(p, "--replicates", "simulation.replicates", type=int)
    _add(p, "--ghost", "simulation.ghost_size", type=int)
    _add(p, "--bound-variant", "simulation.bound_variant")
    _add(p, "--deviation", "simulation.deviation")
    _add(p, "--vc", "simulation.vc", type=int)

    p = sub.add_parser("oracle-majority", parents=[common], help="Exhaustive vote inequalities")
    _add(p, "--max-m", "oracle.max_m", type=int)
    _add(p, "--max-n", "oracle.max_n", type=int)

    p = sub.add_parser("shatter", parents=[common], help="Shatter coefficients and VC search")
    _add(p, "--class", "shatter.class", choices=["stump", "interval", "histogram"])
    p.add_argument("--one-sided", dest="cfg:shatter.two_sided", action="store_false",
                   default=SUPPRESS)
    _add(p, "--bins", "shatter.bins", type=int)
    _add(p, "--points", "shatter.points", type=_float_list, help="Comma-separated 1-D points")
    _add(p, "--m", "shatter.m", type=int, help="Maximize over m-point configurations")
    _add(p, "--max-n", "shatter.max_n", type=int, help="VC search depth")

    sub.add_parser("schema", parents=[common], help="Print the RunConfig JSON schema")

    p = sub.add_parser("generate", parents=[common], help="Write a synthetic dataset CSV")
    _add(p, "--dist", "dataset.synthetic.kind",
         choices=["threshold-noise", "interval-noise", "gaussian-regression", "constant"])
    _add(p, "--flip", "dataset.synthetic.flip", type=float)
    _add(p, "--theta", "dataset.synthetic.theta", type=float)
    _add(p, "--sigma", "dataset.synthetic.sigma", type=float)
    _add(p, "--n", "dataset.n", type=int)
    return parser


def _assign(document: Dict[str, Any], path: str, value: Any) -> None:
    keys = path.split(".")
    node = document
    for key in keys[:-1]:
        node = node.setdefault(key, {})
    last = keys[-1]
    if isinstance(value, dict) and isinstance(node.get(last), dict):
        node[last].update(value)
    else:
        node[last] = value


def build_config(args: argparse.Namespace) -> RunConfig:
    """Layer command-line values over the --config file and validate."""
    document: Dict[str, Any] = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as handle:
                document = json.load(handle)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"cannot read config {args.config}: {e}")
        if not isinstance(document, dict):
            raise ConfigurationError("a config file must hold a JSON object")
    document["command"] = args.command

    for dest, value in sorted(vars(args).items()):
        if dest.startswith("cfg:"):
            path = dest[4:]
            if path == "estimate.variants":
                value = ["out", "in", "maj"] if value == "all" else [value]
            _assign(document, path, value)

    if args.command == "generate":
        document.setdefault("dataset", {}).setdefault("synthetic", {})
    if args.command in ("simulate",) and "simulation" not in document:
        document["simulation"] = {}
    try:
        return RunConfig.model_validate(document)
    except ValidationError as e:
        raise ConfigurationError(f"invalid configuration: {e}")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(debug=True if args.debug else None)

    try:
        config = build_config(args)
        return run(config)
    except ConfigurationError as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_INVALID_CONFIG
    except ValidationError as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_INVALID_CONFIG
    except (SubagError, OSError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
