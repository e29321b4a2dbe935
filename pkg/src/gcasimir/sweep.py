"""Ordered parallel evaluation over separations.

The compiled kernels release the GIL, so a thread pool gives real
parallelism; results are always returned in input order so that output
files do not depend on the thread count.
"""
import os
from concurrent.futures import ThreadPoolExecutor


class SweepError(RuntimeError):
    """A point of a sweep failed; ``key`` identifies it (usually the separation)."""

    def __init__(self, key, exc):
        super().__init__(f"at {key}: {exc}")
        self.key = key
        self.cause = exc


def default_threads():
    try:
        return max(len(os.sched_getaffinity(0)), 1)
    except AttributeError:  # not on Linux
        return os.cpu_count() or 1


def parallel_map(fn, items, threads=None):
    """``[fn(x) for x in items]`` on ``threads`` workers, in input order.

    The first failing item (in input order) is re-raised as
    :class:`SweepError` carrying that item.
    """
    items = list(items)
    threads = default_threads() if threads is None else int(threads)
    if threads < 1:
        raise ValueError("threads must be >= 1")

    def guarded(x):
        try:
            return True, fn(x)
        except Exception as exc:  # reported in order below
            return False, exc

    if threads == 1 or len(items) < 2:
        results = [guarded(x) for x in items]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(guarded, items))
    out = []
    for x, (ok, val) in zip(items, results):
        if not ok:
            raise SweepError(x, val) from val
        out.append(val)
    return out
