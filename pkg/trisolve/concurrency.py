"""Ordered, thread-capped parallel map used by the solvers and the explorer."""

import logging
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from trisolve.config import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: int | None = None) -> list[R]:
    """Apply fn to every item; results come back in input order.

    Runs inline when the cap is 1 so single-threaded runs stay easy to debug.
    """
    items = list(items)
    workers = threads if threads is not None else settings.worker_count
    workers = max(1, min(workers, len(items) or 1))
    if workers == 1:
        return [fn(item) for item in items]
    logger.debug("parallel_map: %d items on %d threads", len(items), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
