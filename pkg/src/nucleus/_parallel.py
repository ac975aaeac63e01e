from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "NUCLEUS_THREADS"


def resolve_threads(threads: int | None) -> int:
    """``None`` falls back to $NUCLEUS_THREADS (default 1); ``0`` means all cores."""
    if threads is None:
        env = os.environ.get(THREADS_ENV, "").strip()
        threads = int(env) if env else 1
    if threads < 0:
        raise ValueError("thread count must be >= 0")
    if threads == 0:
        threads = os.cpu_count() or 1
    return threads


class WorkerPool:
    """Fixed-size pool that runs a function over contiguous chunks of a batch.

    Results come back in chunk order, so merging them is deterministic
    regardless of the thread count.
    """

    def __init__(self, threads: int | None = 1):
        self.threads = resolve_threads(threads)
        self._executor: ThreadPoolExecutor | None = None
        if self.threads > 1:
            self._executor = ThreadPoolExecutor(max_workers=self.threads)

    def map_chunks(self, fn: Callable[[Sequence[T]], R], items: Sequence[T]) -> list[R]:
        if self._executor is None or len(items) < 2:
            return [fn(items)]
        k = min(self.threads, len(items))
        step = -(-len(items) // k)
        chunks = [items[i : i + step] for i in range(0, len(items), step)]
        return list(self._executor.map(fn, chunks))

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    def __enter__(self) -> "WorkerPool":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
