"""Ordered fan-out of independent CPU-bound tasks."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Callable, Dict, List, Sequence, TypeVar

_LOGGER = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def map_ordered(func: Callable[[T], R], tasks: Sequence[T], jobs: int = 1) -> List[R]:
    """Apply ``func`` to every task, up to ``jobs`` at a time.

    Results come back in task order regardless of completion order. With
    ``jobs <= 1`` everything runs inline in the calling process. ``func``
    must be a module-level callable so worker processes can import it.
    """
    if jobs <= 1 or len(tasks) <= 1:
        return [func(task) for task in tasks]

    results: Dict[int, R] = {}
    workers = min(jobs, len(tasks))
    _LOGGER.info("Running %d tasks on %d worker processes", len(tasks), workers)
    with ProcessPoolExecutor(max_workers=workers) as executor:
        future_to_index = {
            executor.submit(func, task): index for index, task in enumerate(tasks)
        }
        for future in as_completed(future_to_index):
            index = future_to_index[future]
            results[index] = future.result()
    return [results[index] for index in range(len(tasks))]
