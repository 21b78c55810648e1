"""Shared fixtures and brute-force oracles."""
import itertools
import math
import os
import sys
from typing import Callable, List, Sequence

import numpy as np
import pytest

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app.models.dataset import Dataset
from app.models.simulation import SyntheticDistribution
from app.services.simulation import generate


@pytest.fixture
def two_fold_data() -> Dataset:
    """n=4, labels adversarial for 1-NN across the two contiguous folds."""
    return Dataset(x=[0.1, 0.2, 0.8, 0.9], y=[1, 2, 1, 2], labels=(1, 2))


@pytest.fixture
def separable_data() -> Dataset:
    return Dataset(x=[1.0, 2.0, 3.0, 4.0], y=[1, 1, 2, 2], labels=(1, 2))


@pytest.fixture
def threshold_data() -> Dataset:
    return generate(SyntheticDistribution(kind="threshold-noise", flip=0.2), 8, seed=5)


@pytest.fixture
def brute_force_out() -> Callable[..., float]:
    return brute_force_estimate


def leave_out_test_sets(n: int, v: int) -> List[Sequence[int]]:
    return [list(c) for c in itertools.combinations(range(n), v)]


def fold_test_sets(n: int, k: int) -> List[Sequence[int]]:
    size = n // k
    return [list(range(j * size, (j + 1) * size)) for j in range(k)]


def brute_force_estimate(learner, data: Dataset, test_sets: Sequence[Sequence[int]],
                         side: str = "out") -> float:
    """Uniform average over test sets of the member's mean zero-one loss, by plain loops."""
    per_vector = []
    for test in test_sets:
        train = [i for i in range(data.n) if i not in test]
        mask = [1 if i in train else 0 for i in range(data.n)]
        predictor = learner.fit(data.subset(mask))
        evaluated = test if side == "out" else train
        wrong = 0
        for i in evaluated:
            prediction = predictor.predict(data.x[i:i + 1])[0]
            wrong += int(prediction != data.y[i])
        per_vector.append(wrong / len(evaluated))
    return math.fsum(per_vector) / len(per_vector)


def query_grid(low: float = -0.5, high: float = 1.5, size: int = 101) -> np.ndarray:
    return np.linspace(low, high, size).reshape(-1, 1)
