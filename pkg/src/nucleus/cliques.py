"""r-clique indexing, per-r-clique s-clique counting and s-clique enumeration.

Cliques are listed by recursive intersection of out-neighbor sets over the
degeneracy orientation, so every clique is produced exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Callable, Iterator, Sequence

from ._parallel import WorkerPool
from .graph import OrientedGraph

Clique = tuple[int, ...]


@dataclass(eq=False)
class RCliqueIndex:
    """Bijection between canonical (sorted) r-cliques and ids in ``[0, n_r)``.

    Ids follow lexicographic order of the vertex tuples: for r=1 the id is the
    vertex id, for r=2 it is the rank in the sorted edge array.
    """

    r: int
    verts_of: list[Clique]
    id_of: dict[Clique, int]

    @property
    def n_r(self) -> int:
        return len(self.verts_of)

    def __len__(self) -> int:
        return len(self.verts_of)


@dataclass(eq=False)
class SCliqueCounts:
    counts: list[int]
    n_s: int
    s: int


def _extend(out_sets, prefix: Clique, cand, depth: int, emit: Callable[[Clique], None]) -> None:
    if depth == 1:
        for w in cand:
            emit(prefix + (w,))
        return
    for w in cand:
        nxt = cand & out_sets[w]
        if len(nxt) >= depth - 1:
            _extend(out_sets, prefix + (w,), nxt, depth - 1, emit)


def iter_cliques(og: OrientedGraph, k: int, roots: Sequence[int] | None = None) -> Iterator[Clique]:
    """Yield every k-clique (as a sorted vertex tuple) exactly once.

    ``roots`` restricts the listing to cliques whose lowest-rank vertex is in it.
    """
    if k < 1:
        raise ValueError("clique size must be >= 1")
    out_sets = og.out_sets
    roots = range(og.n) if roots is None else roots
    found: list[Clique] = []
    for v in roots:
        if k == 1:
            yield (v,)
            continue
        cand = out_sets[v]
        if len(cand) < k - 1:
            continue
        _extend(out_sets, (v,), cand, k - 1, found.append)
        for c in found:
            yield tuple(sorted(c))
        found.clear()


def index_r_cliques(og: OrientedGraph, r: int) -> RCliqueIndex:
    if r < 1:
        raise ValueError("r must be >= 1")
    if r == 1:
        verts = [(v,) for v in range(og.n)]
    elif r == 2:
        verts = [tuple(e) for e in og.base.edges().tolist()]
    else:
        # first pass lists, second pass assigns ids in canonical order
        verts = sorted(iter_cliques(og, r))
    return RCliqueIndex(r, verts, {c: i for i, c in enumerate(verts)})


class CliqueEngine:
    """Counting and per-r-clique s-clique enumeration for a fixed (r, s)."""

    def __init__(self, og: OrientedGraph, idx: RCliqueIndex, s: int):
        if not 1 <= idx.r < s:
            raise ValueError(f"need 1 <= r < s, got r={idx.r} s={s}")
        self.og = og
        self.idx = idx
        self.r = idx.r
        self.s = s
        self.fanout = comb(s, self.r)

    def r_ids_of(self, clique: Clique) -> list[int]:
        """Ids of all r-subsets of a sorted s-clique."""
        if self.r == 1:
            return list(clique)
        id_of = self.idx.id_of
        return [id_of[c] for c in combinations(clique, self.r)]

    def count(self, pool: WorkerPool | None = None) -> SCliqueCounts:
        """Exact number of s-cliques containing each r-clique."""
        pool = pool or WorkerPool(1)
        n_r = self.idx.n_r
        r, s = self.r, self.s
        id_of = self.idx.id_of

        def work(roots: Sequence[int]):
            local = [0] * n_r
            n_s = 0
            for clique in iter_cliques(self.og, s, roots):
                n_s += 1
                if r == 1:
                    for v in clique:
                        local[v] += 1
                else:
                    for c in combinations(clique, r):
                        local[id_of[c]] += 1
            return local, n_s

        parts = pool.map_chunks(work, range(self.og.n))
        counts = parts[0][0]
        n_s = parts[0][1]
        for local, k in parts[1:]:
            n_s += k
            for i, x in enumerate(local):
                if x:
                    counts[i] += x
        return SCliqueCounts(counts, n_s, s)

    def containing(self, rid: int) -> list[list[int]]:
        """For every s-clique of the whole graph containing ``rid``, the ids of
        its other C(s, r) - 1 r-cliques."""
        R = self.idx.verts_of[rid]
        adj_sets = self.og.base.adj_sets
        cand = adj_sets[R[0]]
        for v in R[1:]:
            cand = cand & adj_sets[v]
        need = self.s - self.r
        if len(cand) < need:
            return []
        r = self.r
        if need == 1:
            if r == 1:
                return [[w] for w in cand]
            id_of = self.idx.id_of
            res = []
            for w in cand:
                ids = []
                for i in range(r):
                    rest = R[:i] + R[i + 1 :]
                    ids.append(id_of[tuple(sorted(rest + (w,)))])
                res.append(ids)
            return res
        ws: list[Clique] = []
        out_sets = self.og.out_sets
        for w in cand:
            nxt = cand & out_sets[w]
            if len(nxt) >= need - 1:
                _extend(out_sets, (w,), nxt, need - 1, ws.append)
        res = []
        for W in ws:
            S = tuple(sorted(R + W))
            if r == 1:
                res.append([v for v in S if v != R[0]])
            else:
                id_of = self.idx.id_of
                res.append([id_of[c] for c in combinations(S, r) if c != R])
        return res

    def for_each_containing(
        self,
        rid: int,
        visit: Callable[[list[int]], None],
        live: Callable[[int], bool] | None = None,
    ) -> None:
        """Call ``visit(others)`` once per s-clique containing ``rid`` whose other
        r-cliques all satisfy ``live``."""
        for others in self.containing(rid):
            if live is None or all(live(o) for o in others):
                visit(others)


def count_s_per_r(og: OrientedGraph, idx: RCliqueIndex, s: int, threads: int | None = 1) -> SCliqueCounts:
    with WorkerPool(threads) as pool:
        return CliqueEngine(og, idx, s).count(pool)


def for_each_s_clique_containing(
    og: OrientedGraph,
    idx: RCliqueIndex,
    s: int,
    rid: int,
    visit: Callable[[list[int]], None],
    live: Callable[[int], bool] | None = None,
) -> None:
    CliqueEngine(og, idx, s).for_each_containing(rid, visit, live)
