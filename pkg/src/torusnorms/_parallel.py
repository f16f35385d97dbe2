"""Order-stable thread pool shared by the Monte Carlo and verification code."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

THREADS_ENV = "TORUSNORMS_THREADS"


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    return min(8, os.cpu_count() or 1)


def map_ordered(fn, items, threads: int | None = None) -> list:
    """``[fn(x) for x in items]``, possibly on several threads; result order
    always follows ``items``."""
    items = list(items)
    threads = thread_count() if threads is None else threads
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
