from __future__ import annotations

from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from quasicut.core.configuration import get_toolkit_config
from quasicut.core.logging import get_logger

T = TypeVar("T")
R = TypeVar("R")

_logcore = get_logger(__name__)


def ordered_map(fn: Callable[[T], R], items: Sequence[T], *, workers: int | None = None) -> list[R]:
    """Apply ``fn`` to every item, possibly concurrently, returning results in item order."""
    if workers is None:
        workers = get_toolkit_config().workers

    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    _logcore.trace("Dispatching {count} work items to {workers} workers", count=len(items), workers=workers)
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="quasicut") as executor:
        return list(executor.map(fn, items))


def first_argmax(values: Sequence[float]) -> int:
    """Index of the maximum value; ties resolve to the lowest index."""
    best = 0
    for i in range(1, len(values)):
        if values[i] > values[best]:
            best = i

    return best
