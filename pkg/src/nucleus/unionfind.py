"""Concurrent union-find and the nearest-core table used by the link builders.

Both structures are safe to share between worker threads. Roots are always
the minimum id of their set, so representatives are deterministic no matter
how unites interleave.
"""

from __future__ import annotations

import threading
from typing import Sequence


class Counter:
    """Thread-safe monotone counter."""

    def __init__(self) -> None:
        self.value = 0
        self._lock = threading.Lock()

    def add(self, k: int = 1) -> None:
        with self._lock:
            self.value += k


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.parent)

    def find(self, x: int) -> int:
        parent = self.parent
        while True:
            p = parent[x]
            if p == x:
                return x
            gp = parent[p]
            if gp != p:
                # path halving; a stale write only lengthens a path, never breaks it
                parent[x] = gp
            x = gp

    def _cas_root(self, child: int, new_parent: int) -> bool:
        with self._lock:
            if self.parent[child] != child:
                return False
            self.parent[child] = new_parent
            return True

    def unite(self, a: int, b: int) -> bool:
        """Merge the sets of ``a`` and ``b``; True if they were separate."""
        while True:
            ra, rb = self.find(a), self.find(b)
            if ra == rb:
                return False
            if ra > rb:
                ra, rb = rb, ra
            if self._cas_root(rb, ra):
                return True

    def same(self, a: int, b: int) -> bool:
        while True:
            ra, rb = self.find(a), self.find(b)
            if ra == rb:
                return True
            if self.parent[ra] == ra:
                return False

    def roots(self) -> list[int]:
        return [self.find(x) for x in range(len(self.parent))]


class NearestCoreTable:
    """Per-r-clique optional pointer with compare-and-swap updates."""

    def __init__(self, n: int):
        self.entry: list[int | None] = [None] * n
        self._lock = threading.Lock()

    def __getitem__(self, x: int) -> int | None:
        return self.entry[x]

    def cas(self, x: int, expected: int | None, new: int) -> bool:
        with self._lock:
            if self.entry[x] != expected:
                return False
            self.entry[x] = new
            return True

    def as_dict(self) -> dict[int, int]:
        return {x: v for x, v in enumerate(self.entry) if v is not None}


def components(uf: UnionFind, members: Sequence[int]) -> dict[int, list[int]]:
    """Group ``members`` by representative (keys and lists in ascending order)."""
    groups: dict[int, list[int]] = {}
    for x in sorted(members):
        groups.setdefault(uf.find(x), []).append(x)
    return groups
