"""Acceptance checks: exact oracles, bound identities and Monte Carlo coverage."""
import argparse
import io
import math
import os
import random
import sys
import time
from fractions import Fraction
from typing import List, Tuple

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np

from app.core.logging_config import setup_logging
from app.models.bounds import BoundSpec
from app.models.cv import CvScheme, TrainingVector
from app.models.learner import HypothesisClass
from app.models.simulation import SyntheticDistribution
from app.schemas.run_config import RunConfig
from app.services import bounds, split_select
from app.services.cv_schemes import total_variation_exact
from app.services.learners import ErmLearner, shatter_coefficient
from app.services.majority_oracle import majority_inequality_oracle
from app.services.runner import run
from app.services.simulation import coverage_experiment, generate, l1_experiment

EPS_GRID = [round(0.05 * i, 2) for i in range(1, 11)]


class AcceptanceChecker:
    """Run each acceptance check and collect the results."""

    def __init__(self, replicates: int, ghost_size: int, threads: int):
        self.results: List[Tuple[str, bool, str]] = []
        self.replicates = replicates
        self.ghost_size = ghost_size
        self.threads = threads

    def log_result(self, check: str, success: bool, message: str = ""):
        """Log check result."""
        self.results.append((check, success, message))
        status = "✓" if success else "✗"
        print(f"{status} {check}: {message if message else ('OK' if success else 'FAILED')}")

    def section(self, title: str):
        print("\n" + "=" * 60)
        print(title)
        print("=" * 60)

    def check_total_variation(self) -> bool:
        self.section("Total variation of leave-v-out vectors")
        ok = True
        for n in range(2, 51):
            for v in range(1, n):
                mask = (0,) * v + (1,) * (n - v)
                if total_variation_exact(TrainingVector(mask=mask), (1,) * n) != Fraction(2 * v, n):
                    ok = False
        self.log_result("TV(leave-v-out, 1_n) = 2v/n", ok, "n <= 50, all v")
        return ok

    def check_shatter(self) -> bool:
        self.section("Shatter coefficients")
        rng = np.random.default_rng(0)
        ok = True
        for n in range(1, 9):
            points = np.sort(rng.random(n))
            count = shatter_coefficient(HypothesisClass(kind="interval"), points)
            ok &= count == n * (n + 1) // 2 + 1 <= (n + 1) ** 2
        self.log_result("Interval S(n) = n(n+1)/2 + 1", ok, "n <= 8")

        classes = [HypothesisClass(kind="stump"), HypothesisClass(kind="stump", two_sided=False),
                   HypothesisClass(kind="interval"), HypothesisClass(kind="histogram", bins=3)]
        growth = all(
            shatter_coefficient(c, rng.random(n)) <= (n + 1) ** c.declared_vc
            for c in classes for n in range(1, 13)
        )
        self.log_result("S(n) <= (n+1)^V_C", growth, "all classes, n <= 12")
        return ok and growth

    def check_inverse(self) -> bool:
        self.section("Inverse property of f")
        rnd = random.Random(0)
        worst = 0.0
        for _ in range(1000):
            n = rnd.randint(10, 5000)
            p = rnd.uniform(0.001, 0.05)
            vc = rnd.randint(1, 5)
            log_delta_n = split_select.log_delta_threshold(n, p, vc)
            log_delta = rnd.uniform(log_delta_n, 0.0)
            eps = split_select.f_inverse_log(n, p, log_delta, vc)
            worst = max(worst, abs(bounds.log_hoeffding(n, p, eps) - log_delta)
                        / max(1.0, abs(log_delta)))
            log_delta = log_delta_n - rnd.uniform(0.1, 200.0)
            eps = split_select.f_inverse_log(n, p, log_delta, vc)
            worst = max(worst, abs(bounds.log_vc_train(n, p, eps, vc, scale=9.0) - log_delta)
                        / max(1.0, abs(log_delta)))
        ok = worst <= 1e-9
        self.log_result("bound(f(delta)) = delta", ok, f"worst relative error {worst:.2e}")
        return ok

    def check_monotonicity(self) -> bool:
        self.section("Monotonicity and limits")
        grid = np.linspace(0.0, 1.0, 1000).tolist()
        specs = [
            BoundSpec(variant="vsym", n=100, p=0.1),
            BoundSpec(variant="sym", n=100, p=0.1, vc=1),
            BoundSpec(variant="erm", n=1000, p=0.02, vc=1),
            BoundSpec(variant="kfold", n=100, k=10, vc=1),
            BoundSpec(variant="half-out", n=100, p=0.2),
            BoundSpec(variant="erm-half", n=100, p=0.2, vc=1),
            BoundSpec(variant="stab-strong", n=500, p=0.1, lam=0.01, delta_stab=1e-6),
        ]
        ok = True
        for spec in specs:
            values = [v.value for v in bounds.evaluate_grid(spec, grid)]
            ok &= values[0] == 1.0 and all(b <= a for a, b in zip(values, values[1:]))
        ok &= all(bounds.v_sym(10, 0.1, e).value < 1.0 for e in grid[1:])
        self.log_result("Nonincreasing in eps, 1 at eps=0", ok, f"{len(specs)} variants")
        return ok

    def check_majority_oracle(self) -> bool:
        self.section("Majority-vote counting inequalities")
        started = time.perf_counter()
        verdict = majority_inequality_oracle(4, 5)
        self.log_result("Exhaustive m <= 4, N <= 5", verdict.passed,
                        f"{verdict.matrices_checked} matrices in "
                        f"{time.perf_counter() - started:.1f}s")
        return verdict.passed

    def _coverage(self, name: str, bound_variant: str, vc=None) -> bool:
        report = coverage_experiment(
            SyntheticDistribution(kind="threshold-noise", flip=0.2),
            ErmLearner(HypothesisClass(kind="stump", two_sided=False)),
            CvScheme(kind="kfold", n=60, k=5),
            n=60,
            eps_grid=EPS_GRID,
            replicates=self.replicates,
            ghost_size=self.ghost_size,
            seed=2024,
            bound_variant=bound_variant,
            vc=vc,
            threads=self.threads,
        )
        worst = min(row.margin + row.slack for row in report.rows)
        self.log_result(name, not report.violations, f"smallest margin + slack {worst:.4f}")
        return not report.violations

    def check_coverage(self) -> bool:
        self.section("Coverage: threshold task, half-line ERM, n=60, 5-fold")
        results = [
            self._coverage("min(B_sym, V_sym)", "sym", vc=1),
            self._coverage("B_ERM", "erm", vc=1),
            self._coverage("half-out classifier bound", "half-out"),
        ]
        return all(results)

    def check_l1(self) -> bool:
        self.section("L1 bound: n=100, p=0.25")
        report = l1_experiment(
            SyntheticDistribution(kind="threshold-noise", flip=0.2),
            ErmLearner(HypothesisClass(kind="stump", two_sided=False)),
            CvScheme(kind="kfold", n=100, k=4),
            n=100,
            replicates=self.replicates,
            ghost_size=self.ghost_size,
            seed=7,
            vc=1,
            threads=self.threads,
        )
        limit = min(report.bound, report.erm_bound)
        self.log_result("mean + 3 SE <= bound", report.holds,
                        f"{report.mean:.4f} + 3*{report.standard_error:.4f} vs {limit:.4f}")
        return report.holds

    def check_determinism(self) -> bool:
        self.section("Determinism")
        config = RunConfig(
            command="estimate",
            seed=3,
            quiet=True,
            dataset={"synthetic": {"kind": "threshold-noise"}, "n": 12},
            learner={"learner": "erm", "class": "stump"},
            scheme={"kind": "lpo", "v": 2},
        )
        outputs = []
        for _ in range(2):
            stream = io.StringIO()
            run(config, stream=stream)
            outputs.append(stream.getvalue())
        ok = outputs[0] == outputs[1] and bool(outputs[0])
        self.log_result("Identical artifacts", ok, f"{len(outputs[0])} bytes")
        return ok

    def check_generator(self) -> bool:
        self.section("Synthetic generator")
        dist = SyntheticDistribution(kind="threshold-noise", flip=0.2)
        data = generate(dist, 100_000, seed=11)
        clean = np.where(data.x[:, 0] > dist.theta, 2, 1)
        rate = float(np.mean(clean != data.y))
        slack = 3.0 * math.sqrt(0.2 * 0.8 / data.n)
        ok = abs(rate - 0.2) <= slack
        self.log_result("Flip rate", ok, f"{rate:.4f} vs 0.2 +/- {slack:.4f}")
        return ok


def main() -> bool:
    parser = argparse.ArgumentParser(description="Run the acceptance checks")
    parser.add_argument("--quick", action="store_true",
                        help="Fewer replicates and a smaller ghost sample")
    parser.add_argument("--threads", type=int, default=1, help="Worker threads")
    args = parser.parse_args()
    setup_logging()

    replicates, ghost_size = (200, 2000) if args.quick else (1000, 20_000)
    checker = AcceptanceChecker(replicates, ghost_size, args.threads)
    checks = [
        checker.check_total_variation,
        checker.check_shatter,
        checker.check_inverse,
        checker.check_monotonicity,
        checker.check_majority_oracle,
        checker.check_generator,
        checker.check_determinism,
        checker.check_coverage,
        checker.check_l1,
    ]
    all_ok = all([check() for check in checks])

    print("\n" + "=" * 60)
    passed = sum(1 for _, ok, _ in checker.results if ok)
    print(f"{passed}/{len(checker.results)} checks passed")
    return all_ok


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
