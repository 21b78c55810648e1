"""Batch processing utilities."""
from typing import Callable, Iterable, List, TypeVar

from joblib import Parallel, delayed
from tqdm import tqdm

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(
    func: Callable[[T], R],
    items: Iterable[T],
    threads: int = 1,
    description: str = "Processing",
    show_progress: bool = False,
) -> List[R]:
    """
    Apply ``func`` to every item, optionally on a thread pool.

    Results come back in input order whatever the thread count, so callers
    that derive per-item seeds get identical output for any ``threads``.

    Args:
        func: Function applied to each item
        items: Items to process
        threads: Worker count; 1 runs inline
        description: Description for progress bar
        show_progress: Draw a tqdm bar on stderr

    Returns:
        List of results, one per item
    """
    items = list(items)
    if threads <= 1:
        iterator = tqdm(items, desc=description, disable=not show_progress)
        return [func(item) for item in iterator]

    results = Parallel(n_jobs=threads, prefer="threads", return_as="generator")(
        delayed(func)(item) for item in items
    )
    return list(tqdm(results, total=len(items), desc=description, disable=not show_progress))
