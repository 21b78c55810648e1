"""Exhaustive checks of the majority-vote counting inequalities."""
import logging
from typing import Any, Dict, Optional

import numpy as np

from app.core.constants import ORACLE_MAX_M, ORACLE_MAX_N
from app.core.exceptions import RefusedError
from app.models.ensemble import MistakeMatrix
from app.models.simulation import MistakeSummary, OracleVerdict

logger = logging.getLogger(__name__)

# Integer forms of the checked inequalities, in check order
INEQUALITIES = (
    "kappa*floor((N+1)/2) <= sum",
    "e_B <= (N/floor((N+1)/2)) e_a",
    "e_B <= l e_G",
    "e_B >= 1 - l(1 - e_G)",
)
INFORMATIONAL = "e_B >= (N/l) e_a - 1/2"


def vote_threshold(members: int) -> int:
    """Mistakes in a row at which the strict-majority vote errs."""
    return (members + 1) // 2


def strict_majority(members: int) -> int:
    return members // 2 + 1


def summarize(matrix: MistakeMatrix) -> MistakeSummary:
    entries = matrix.as_array()
    m, members = entries.shape
    l = strict_majority(members)  # noqa: E741
    kappa = int((entries.sum(axis=1) >= vote_threshold(members)).sum())
    total = int(entries.sum())
    best_l_total = int(np.sort(entries.sum(axis=0))[:l].sum())
    return MistakeSummary(
        m=m,
        members=members,
        kappa=kappa,
        total=total,
        best_l_total=best_l_total,
        l=l,
        e_a=total / (m * members),
        e_b=kappa / m,
        e_g=best_l_total / (m * l),
    )


def _all_matrices(m: int, members: int) -> np.ndarray:
    cells = m * members
    codes = np.arange(2 ** cells, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(cells, dtype=np.int64)) & 1
    return bits.astype(np.int8).reshape(-1, m, members)


def _check_shape(m: int, members: int) -> Dict[str, Any]:
    matrices = _all_matrices(m, members)
    h = vote_threshold(members)
    l = strict_majority(members)  # noqa: E741
    row_sums = matrices.sum(axis=2, dtype=np.int64)
    kappa = (row_sums >= h).sum(axis=1)
    total = row_sums.sum(axis=1)
    best_l = np.sort(matrices.sum(axis=1, dtype=np.int64), axis=1)[:, :l].sum(axis=1)

    holds = (
        kappa * h <= total,
        # e_B <= (N/h) e_a reduces to the same integer inequality
        kappa * h <= total,
        kappa <= best_l,
        kappa >= m * (1 - l) + best_l,
    )
    result: Dict[str, Any] = {"checked": len(matrices), "failure": None, "informational": None}
    for name, ok in zip(INEQUALITIES, holds):
        if not ok.all():
            index = int(np.argmin(ok))
            result["failure"] = {"inequality": name, "m": m, "N": members,
                                 "matrix": matrices[index].tolist()}
            break

    lower_vote = 2 * l * kappa >= 2 * total - l * m
    if not lower_vote.all():
        index = int(np.argmin(lower_vote))
        result["informational"] = {"inequality": INFORMATIONAL, "m": m, "N": members,
                                   "matrix": matrices[index].tolist()}
    return result


def majority_inequality_oracle(max_m: int = ORACLE_MAX_M,
                               max_n: int = ORACLE_MAX_N) -> OracleVerdict:
    """Check every binary mistake matrix with m <= max_m rows and N <= max_n columns."""
    if not 1 <= max_m <= ORACLE_MAX_M or not 1 <= max_n <= ORACLE_MAX_N:
        raise RefusedError(f"oracle enumeration is capped at m <= {ORACLE_MAX_M}, "
                           f"N <= {ORACLE_MAX_N}; got m={max_m}, N={max_n}")
    checked = 0
    counterexample: Optional[Dict[str, Any]] = None
    informational: Optional[Dict[str, Any]] = None
    for m in range(1, max_m + 1):
        for members in range(1, max_n + 1):
            result = _check_shape(m, members)
            checked += result["checked"]
            if informational is None and result["informational"] is not None:
                informational = result["informational"]
            if result["failure"] is not None:
                counterexample = result["failure"]
                logger.warning(f"Counterexample for {counterexample['inequality']} at "
                               f"m={m}, N={members}")
                break
        if counterexample is not None:
            break

    logger.info(f"Majority oracle checked {checked} matrices up to m={max_m}, N={max_n}")
    return OracleVerdict(
        passed=counterexample is None,
        max_m=max_m,
        max_n=max_n,
        matrices_checked=checked,
        counterexample=counterexample,
        informational=informational,
    )
