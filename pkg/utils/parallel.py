"""Ordered fan-out over a capped thread pool."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

from utils.errors import DomainException

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> List[R]:
    """
    Applies `fn` to every item and returns the results in input order.

    The worker count never changes the results, only the wall time.
    """
    if threads < 1:
        raise DomainException("threads", threads, "threads >= 1")
    items = list(items)
    if threads == 1 or len(items) <= 1:
        return [fn(item) for item in items]

    workers = min(threads, len(items))
    logging.debug(f"Dispatching {len(items)} tasks over {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
