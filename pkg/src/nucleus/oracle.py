"""Brute-force reference implementations for small graphs.

Cliques come from testing every vertex subset against the adjacency matrix;
peeling removes one r-clique at a time. Nothing here shares code with the
fast path beyond the :class:`Graph` container.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .graph import Graph


def adjacency_matrix(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n), dtype=bool)
    e = g.edges()
    a[e[:, 0], e[:, 1]] = True
    a[e[:, 1], e[:, 0]] = True
    return a


def _all_subsets(n: int, k: int) -> np.ndarray:
    """All k-subsets of range(n) as rows, lexicographic."""
    rows = np.arange(n, dtype=np.int64)[:, None]
    for _ in range(k - 1):
        last = rows[:, -1]
        reps = n - 1 - last
        base = np.repeat(rows, reps, axis=0)
        # offsets 1..reps within each repeated block
        starts = np.cumsum(reps) - reps
        step = np.arange(len(base), dtype=np.int64) - np.repeat(starts, reps) + 1
        rows = np.concatenate([base, (np.repeat(last, reps) + step)[:, None]], axis=1)
    return rows


def all_cliques(g: Graph, k: int) -> list[tuple[int, ...]]:
    """Every k-subset of vertices that is pairwise adjacent, in lexicographic order."""
    if k < 1 or k > g.n:
        return []
    if k == 1:
        return [(v,) for v in range(g.n)]
    a = adjacency_matrix(g)
    subsets = _all_subsets(g.n, k)
    ok = np.ones(len(subsets), dtype=bool)
    for i, j in combinations(range(k), 2):
        ok &= a[subsets[:, i], subsets[:, j]]
    return [tuple(row) for row in subsets[ok].tolist()]


@dataclass(eq=False)
class OracleResult:
    r_cliques: list[tuple[int, ...]]
    coreness: list[int]
    s_cliques: list[tuple[int, ...]]
    # membership[j] = ids of the r-cliques inside s-clique j
    membership: list[list[int]]

    def partitions(self) -> dict[int, set[frozenset[int]]]:
        k = max(self.coreness, default=0)
        return {c: oracle_nuclei(self, c) for c in range(1, k + 1)}


def _setup(g: Graph, r: int, s: int):
    if not 1 <= r < s:
        raise ValueError("need 1 <= r < s")
    rc = all_cliques(g, r)
    pos = {c: i for i, c in enumerate(rc)}
    sc = all_cliques(g, s)
    membership = [[pos[sub] for sub in combinations(S, r)] for S in sc]
    return rc, sc, membership


def oracle_peel(g: Graph, r: int, s: int) -> OracleResult:
    """Sequential peeling: repeatedly drop the r-clique with fewest live s-cliques."""
    rc, sc, membership = _setup(g, r, s)
    n_r = len(rc)
    inside: list[list[int]] = [[] for _ in range(n_r)]
    for j, mem in enumerate(membership):
        for x in mem:
            inside[x].append(j)
    deg = [len(v) for v in inside]
    live_s = [True] * len(sc)
    removed = [False] * n_r
    coreness = [0] * n_r
    running = 0
    for _ in range(n_r):
        best = min((x for x in range(n_r) if not removed[x]), key=lambda x: (deg[x], x))
        running = max(running, deg[best])
        coreness[best] = running
        removed[best] = True
        for j in inside[best]:
            if live_s[j]:
                live_s[j] = False
                for x in membership[j]:
                    deg[x] -= 1
    return OracleResult(rc, coreness, sc, membership)


def fixpoint_coreness(g: Graph, r: int, s: int) -> list[int]:
    """Coreness by definition: for each c, shrink to the largest sub-family of
    r-cliques in which every member lies in >= c s-cliques made of members."""
    rc, sc, membership = _setup(g, r, s)
    n_r = len(rc)
    coreness = [0] * n_r
    c = 1
    alive = [True] * n_r
    while any(alive):
        changed = True
        while changed:
            changed = False
            deg = [0] * n_r
            for mem in membership:
                if all(alive[x] for x in mem):
                    for x in mem:
                        deg[x] += 1
            for x in range(n_r):
                if alive[x] and deg[x] < c:
                    alive[x] = False
                    changed = True
        for x in range(n_r):
            if alive[x]:
                coreness[x] = c
        c += 1
    return coreness


def oracle_nuclei(res: OracleResult, c: int) -> set[frozenset[int]]:
    """Components of r-cliques with coreness >= c, joined when they share an
    s-clique all of whose r-cliques have coreness >= c."""
    n_r = len(res.coreness)
    alive = [x >= c for x in res.coreness]
    comp = list(range(n_r))

    def root(x: int) -> int:
        while comp[x] != x:
            x = comp[x]
        return x

    for mem in res.membership:
        if all(alive[x] for x in mem):
            a = root(mem[0])
            for x in mem[1:]:
                b = root(x)
                if a != b:
                    comp[b] = a
    groups: dict[int, set[int]] = {}
    for x in range(n_r):
        if alive[x]:
            groups.setdefault(root(x), set()).add(x)
    return {frozenset(v) for v in groups.values()}


def nucleus_fixpoint_ok(res: OracleResult, block: frozenset[int], c: int) -> bool:
    """Every member sits in >= c s-cliques made only of block members."""
    deg = dict.fromkeys(block, 0)
    for mem in res.membership:
        if all(x in block for x in mem):
            for x in mem:
                deg[x] += 1
    return all(d >= c for d in deg.values())
