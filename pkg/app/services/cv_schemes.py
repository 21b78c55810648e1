"""Training-vector distributions for cross-validation procedures."""
import itertools
import logging
import math
from collections import Counter
from fractions import Fraction
from typing import Dict, Iterable, Sequence, Tuple, Union

import numpy as np

from app.core.constants import SYMMETRY_TOLERANCE
from app.core.exceptions import ConfigurationError, DomainError, RefusedError
from app.models.cv import CvScheme, TrainingVector, WeightedVectorSet

logger = logging.getLogger(__name__)


def _mask_from_test(n: int, test_indices: Iterable[int]) -> Tuple[int, ...]:
    mask = [1] * n
    for i in test_indices:
        mask[i] = 0
    return tuple(mask)


def _uniform_set(masks: Iterable[Tuple[int, ...]]) -> WeightedVectorSet:
    vectors = sorted(TrainingVector(mask=m) for m in masks)
    weight = 1.0 / len(vectors)
    return WeightedVectorSet(vectors=tuple(vectors), weights=(weight,) * len(vectors), exact=True)


def _sampled_set(counts: Dict[Tuple[int, ...], int], draws: int) -> WeightedVectorSet:
    # Duplicates keep their accumulated weight
    ordered = sorted(counts)
    return WeightedVectorSet(
        vectors=tuple(TrainingVector(mask=m) for m in ordered),
        weights=tuple(counts[m] / draws for m in ordered),
        exact=False,
    )


def _draw_test_sets(n: int, test_size: int, draws: int, seed: int) -> WeightedVectorSet:
    rng = np.random.default_rng(seed)
    counts: Counter = Counter()
    for _ in range(draws):
        test = rng.choice(n, size=test_size, replace=False)
        counts[_mask_from_test(n, test.tolist())] += 1
    return _sampled_set(counts, draws)


def enumerate_vectors(scheme: CvScheme) -> WeightedVectorSet:
    """Support of Q with its weights, or a seeded sample of it.

    k-fold uses contiguous folds in dataset order; hold-out trains on the
    first n(1 - p) samples.
    """
    n = scheme.n

    if scheme.kind == "kfold":
        fold = n // scheme.k
        return _uniform_set(
            _mask_from_test(n, range(j * fold, (j + 1) * fold)) for j in range(scheme.k)
        )

    if scheme.kind == "holdout":
        train_size = n - scheme.test_size
        mask = (1,) * train_size + (0,) * scheme.test_size
        return WeightedVectorSet(vectors=(TrainingVector(mask=mask),), weights=(1.0,), exact=True)

    if scheme.kind == "mc":
        return _draw_test_sets(n, scheme.test_size, scheme.draws, scheme.seed)

    # loo and lpo
    test_size = scheme.test_size
    total = math.comb(n, test_size)
    if total <= scheme.max_enum:
        return _uniform_set(
            _mask_from_test(n, test) for test in itertools.combinations(range(n), test_size)
        )
    if scheme.draws is None:
        raise ConfigurationError(
            f"C({n},{test_size})={total} exceeds the enumeration cap {scheme.max_enum} "
            "and no sampling budget was given"
        )
    logger.debug(f"C({n},{test_size})={total} above cap, sampling {scheme.draws} vectors")
    return _draw_test_sets(n, test_size, scheme.draws, scheme.seed)


def test_vector(v: TrainingVector) -> TrainingVector:
    """V^ts = 1_n - V^tr."""
    return TrainingVector(mask=tuple(1 - bit for bit in v.mask))


# Keep pytest from collecting this when imported into a test module
test_vector.__test__ = False


def inclusion_probabilities(vector_set: WeightedVectorSet) -> np.ndarray:
    """Pr(V_i = 1) for every index i."""
    if not vector_set.exact:
        raise RefusedError("inclusion probabilities of a sampled set say nothing about symmetry")
    masks = np.array([v.mask for v in vector_set.vectors], dtype=float)
    weights = np.asarray(vector_set.weights, dtype=float)
    return weights @ masks


def is_symmetric(vector_set: WeightedVectorSet) -> bool:
    probabilities = inclusion_probabilities(vector_set)
    return bool(np.max(probabilities) - np.min(probabilities) <= SYMMETRY_TOLERANCE)


MaskLike = Union[TrainingVector, Sequence[int]]


def _bits(mask: MaskLike) -> Tuple[int, ...]:
    bits = mask.mask if isinstance(mask, TrainingVector) else tuple(int(b) for b in mask)
    if any(b not in (0, 1) for b in bits):
        raise DomainError(f"mask entries must be 0 or 1, got {bits}")
    return bits


def total_variation_exact(u: MaskLike, v: MaskLike) -> Fraction:
    """Distance between the weighted empirical measures P_{n,u} and P_{n,v}, exactly.

    Accepts the full mask 1_n, which is not a training vector but is the
    reference measure P_n of the stability definitions.
    """
    u_bits, v_bits = _bits(u), _bits(v)
    if len(u_bits) != len(v_bits):
        raise DomainError(f"masks of different lengths {len(u_bits)} and {len(v_bits)}")
    su, sv = sum(u_bits), sum(v_bits)
    if su == 0 or sv == 0:
        raise DomainError("zero-sum mask")
    return sum(
        (abs(Fraction(a, su) - Fraction(b, sv)) for a, b in zip(u_bits, v_bits)),
        Fraction(0),
    )


def total_variation(u: MaskLike, v: MaskLike) -> float:
    return float(total_variation_exact(u, v))
