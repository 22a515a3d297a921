"""Thread-pool map capped by the FRSTR_THREADS environment variable."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def max_workers() -> int:
    raw = os.environ.get("FRSTR_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def pmap(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Order-preserving map; runs serially when one worker is allowed."""
    items = list(items)
    workers = min(max_workers(), len(items))
    if workers <= 1:
        return [fn(v) for v in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
