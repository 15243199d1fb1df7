"""Order-preserving thread pool for independent integrations.

Compiled kernels release the GIL, so threads give real parallelism on the
numba backend. Results always come back in input order.
"""

import os
from concurrent.futures import ThreadPoolExecutor

THREADS_ENV = "SENSIREACH_THREADS"


def resolve_threads(threads=None):
    """``None`` reads SENSIREACH_THREADS (default 1); ``0`` means all cores."""
    if threads is None:
        raw = os.environ.get(THREADS_ENV, "").strip()
        threads = int(raw) if raw else 1
    if threads < 0:
        raise ValueError("threads must be >= 0")
    if threads == 0:
        threads = os.cpu_count() or 1
    return threads


def parallel_map(func, items, threads=None):
    threads = resolve_threads(threads)
    if threads == 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))
