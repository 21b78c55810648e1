"""Seed derivation for reproducible parallel runs."""
import numpy as np


def derive_seed(master: int, *index: int) -> int:
    """Independent 63-bit seed for the work item at ``index`` under ``master``.

    Depends only on (master, index), never on scheduling order.
    """
    sequence = np.random.SeedSequence([int(master), *(int(i) for i in index)])
    return int(sequence.generate_state(1, dtype=np.uint64)[0]) >> 1
