"""Hierarchy construction strategies.

``te``  level-by-level connectivity after peeling, one persistent union-find.
``bl``  one union-find per level, every link unites in all levels it spans.
``el``  one union-find for equal-coreness connectivity plus a nearest-core
        table ``L`` that points each component at the closest lower core it
        merges into.

``bl`` and ``el`` receive ``link(R', R, values)`` calls from the peeler; ``te``
runs entirely after peeling.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .cliques import CliqueEngine
from .tree import NO_PARENT, HierarchyTree, TreeError, build_tree
from .unionfind import Counter, NearestCoreTable, UnionFind

ALGOS = ("te", "el", "bl")


def _flatten(parent: np.ndarray) -> np.ndarray:
    """Resolve every entry of a union-find parent array to its root."""
    roots = parent.copy()
    while True:
        nxt = roots[roots]
        if np.array_equal(nxt, roots):
            return roots
        roots = nxt


class TwoPassBuilder:
    """Builds the tree after peeling, from coreness alone."""

    name = "te"
    link = None

    def __init__(self, n_r: int):
        self.n_r = n_r
        self.unites = Counter()
        self.links = Counter()

    def construct(self, engine: CliqueEngine, values: Sequence[int]) -> tuple[list[int], list[int]]:
        n_r = self.n_r
        parent = [NO_PARENT] * n_r
        level = list(values)
        by_core: dict[int, list[int]] = {}
        for R, c in enumerate(values):
            if c >= 1:
                by_core.setdefault(c, []).append(R)
        uf = UnionFind(n_r)
        top: dict[int, int] = {}  # uf root -> topmost tree node of its component
        containing = engine.containing
        for i in sorted(by_core, reverse=True):
            pairs: list[tuple[int, int]] = []
            for R in by_core[i]:
                for others in containing(R):
                    if all(values[o] >= i for o in others):
                        for o in others:
                            pairs.append((R, o))
            involved = {uf.find(x) for pair in pairs for x in pair}
            involved.update(by_core[i])
            old_top = {x: top.get(x, x) for x in involved}
            for a, b in pairs:
                self.unites.add()
                uf.unite(a, b)
            groups: dict[int, set[int]] = {}
            for x in involved:
                groups.setdefault(uf.find(x), set()).add(old_top[x])
            for old in involved:
                top.pop(old, None)
            for root, kids in groups.items():
                if len(kids) >= 2:
                    node = len(parent)
                    parent.append(NO_PARENT)
                    level.append(i)
                    for k in kids:
                        parent[k] = node
                    top[root] = node
                else:
                    top[root] = next(iter(kids))
        return parent, level


class BasicLinker:
    """Per-level union-finds; a link between cores a and b unites in levels 1..min(a, b)."""

    name = "bl"

    def __init__(self, n_r: int):
        self.n_r = n_r
        self.levels: dict[int, UnionFind] = {}
        self.unites = Counter()
        self.links = Counter()

    def level_uf(self, i: int) -> UnionFind:
        uf = self.levels.get(i)
        if uf is None:
            uf = self.levels.setdefault(i, UnionFind(self.n_r))
        return uf

    def link(self, a: int, b: int, nd: Sequence[int]) -> None:
        self.links.add()
        m = min(nd[a], nd[b])
        for i in range(1, m + 1):
            self.level_uf(i).unite(a, b)
        if m > 0:
            self.unites.add(m)

    def construct(self, engine: CliqueEngine | None, values: Sequence[int]) -> tuple[list[int], list[int]]:
        n_r = self.n_r
        core = np.asarray(values, dtype=np.int64)
        parent = [NO_PARENT] * n_r
        level = list(values)
        top = np.arange(n_r, dtype=np.int64)
        k = int(core.max()) if n_r else 0
        for i in range(k, 0, -1):
            members = np.flatnonzero(core >= i)
            if i in self.levels:
                roots = _flatten(np.asarray(self.levels[i].parent, dtype=np.int64))[members]
            else:
                roots = members
            pairs = np.unique(np.stack([roots, top[members]], axis=1), axis=0)
            uroots, start, cnt = np.unique(pairs[:, 0], return_index=True, return_counts=True)
            new_node = np.full(len(uroots), -1, dtype=np.int64)
            for j, (st, c) in enumerate(zip(start.tolist(), cnt.tolist())):
                if c < 2:
                    continue
                node = len(parent)
                parent.append(NO_PARENT)
                level.append(i)
                for kid in pairs[st : st + c, 1].tolist():
                    parent[kid] = node
                new_node[j] = node
            moved = new_node[np.searchsorted(uroots, roots)]
            hit = moved >= 0
            top[members[hit]] = moved[hit]
        return parent, level


class EfficientLinker:
    """Single union-find over equal-coreness connectivity plus nearest-core table."""

    name = "el"

    def __init__(self, n_r: int):
        self.n_r = n_r
        self.uf = UnionFind(n_r)
        self.L = NearestCoreTable(n_r)
        self.unites = Counter()
        self.links = Counter()

    def link(self, a: int | None, b: int | None, nd: Sequence[int]) -> None:
        self.links.add()
        find = self.uf.find
        L = self.L
        stack: list[tuple[int | None, int | None]] = [(a, b)]
        while stack:
            R, Q = stack.pop()
            if R is None or Q is None:
                continue
            if nd[Q] < nd[R]:
                R, Q = Q, R
            R, Q = find(R), find(Q)
            if nd[R] == nd[Q]:
                if R == Q:
                    continue
                self.unites.add()
                self.uf.unite(R, Q)
                # the displaced root's nearest core now belongs to the merged set
                for x in (R, Q):
                    px = find(x)
                    if px != x:
                        stack.append((L[x], px))
                continue
            while True:
                Q = find(Q)
                LQ = L[Q]
                if LQ is None:
                    if L.cas(Q, None, R):
                        pq = find(Q)
                        if pq != Q:
                            stack.append((R, pq))
                        break
                elif nd[LQ] < nd[R]:
                    if L.cas(Q, LQ, R):
                        pq = find(Q)
                        if pq != Q:
                            stack.append((R, pq))
                        stack.append((R, LQ))
                        break
                else:
                    stack.append((R, LQ))
                    break

    def construct(self, engine: CliqueEngine | None, values: Sequence[int]) -> tuple[list[int], list[int]]:
        n_r = self.n_r
        find = self.uf.find
        parent = [NO_PARENT] * n_r
        level = list(values)
        node_of: dict[int, int] = {}
        for R in range(n_r):
            if values[R] < 1:
                continue
            root = find(R)
            node = node_of.get(root)
            if node is None:
                node = len(parent)
                node_of[root] = node
                parent.append(NO_PARENT)
                level.append(values[root])
            parent[R] = node
        for root, node in node_of.items():
            target = self.L[root]
            if target is None:
                continue
            troot = find(target)
            if values[troot] >= values[root]:
                raise TreeError(f"cycle in nearest-core links at r-clique {root}")
            parent[node] = node_of[troot]
        return parent, level


def make_builder(algo: str, n_r: int):
    if algo == "te":
        return TwoPassBuilder(n_r)
    if algo == "bl":
        return BasicLinker(n_r)
    if algo == "el":
        return EfficientLinker(n_r)
    raise ValueError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGOS)}")


def finish_tree(
    builder,
    engine: CliqueEngine,
    values: Sequence[int],
    collapse: bool = True,
) -> HierarchyTree:
    parent, level = builder.construct(engine, values)
    return build_tree(
        parent,
        level,
        builder.n_r,
        r=engine.r,
        s=engine.s,
        leaf_vertices=engine.idx.verts_of,
        collapse=collapse,
    )
