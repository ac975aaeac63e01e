"""Hierarchy tree model, level cuts, densities and the text export format.

Nodes ``0..n_r-1`` are the leaves (one per r-clique, level = coreness);
internal nodes follow. ``parent[v] == -1`` marks a root. Along any path the
level of an internal parent is strictly below that of its child.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from math import comb
from typing import IO, Sequence

import numpy as np

from .graph import Graph
from .unionfind import UnionFind

NO_PARENT = -1


class TreeError(ValueError):
    pass


@dataclass(eq=False)
class Nucleus:
    level: int
    members: np.ndarray
    formation_level: int
    vertices: np.ndarray | None = None
    edge_density: float | None = None
    density_defined: bool = True

    @property
    def num_r_cliques(self) -> int:
        return len(self.members)


@dataclass(eq=False)
class HierarchyTree:
    n_r: int
    parent: np.ndarray
    level: np.ndarray
    r: int = 0
    s: int = 0
    leaf_vertices: list[tuple[int, ...]] | None = None
    _lift: list[np.ndarray] | None = field(default=None, repr=False)

    @property
    def num_nodes(self) -> int:
        return len(self.parent)

    @property
    def num_internal(self) -> int:
        return self.num_nodes - self.n_r

    @property
    def k_max(self) -> int:
        return int(self.level[: self.n_r].max()) if self.n_r else 0

    @property
    def roots(self) -> np.ndarray:
        return np.flatnonzero(self.parent == NO_PARENT)

    def children(self) -> list[list[int]]:
        kids: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for v, p in enumerate(self.parent.tolist()):
            if p != NO_PARENT:
                kids[p].append(v)
        return kids

    def validate(self) -> None:
        par, lev = self.parent, self.level
        n = self.num_nodes
        has_par = par != NO_PARENT
        if np.any((par < NO_PARENT) | (par >= n)):
            raise TreeError("parent id out of range")
        if np.any(has_par & (par < self.n_r)):
            raise TreeError("a leaf cannot be a parent")
        child = np.flatnonzero(has_par)
        internal = child[child >= self.n_r]
        if np.any(lev[par[internal]] >= lev[internal]):
            raise TreeError("internal node level must exceed its parent's level")
        leaves = child[child < self.n_r]
        if np.any(lev[par[leaves]] > lev[leaves]):
            raise TreeError("leaf level below its parent's level")

    # -- level cuts ---------------------------------------------------------

    def _lifting(self) -> list[np.ndarray]:
        if self._lift is None:
            up = self.parent.copy()
            roots = up == NO_PARENT
            up[roots] = np.flatnonzero(roots)
            table = [up]
            for _ in range(max(1, int(self.num_nodes).bit_length())):
                nxt = table[-1][table[-1]]
                if np.array_equal(nxt, table[-1]):
                    break
                table.append(nxt)
            self._lift = table
        return self._lift

    def top_at(self, c: int) -> np.ndarray:
        """For each leaf with level >= c, its highest ancestor with level >= c
        (-1 for leaves below c)."""
        lev = self.level
        cur = np.arange(self.n_r, dtype=np.int64)
        ok = lev[cur] >= c
        cur = cur[ok]
        # levels never increase going up, so greedy jumps from the top down work
        for up in reversed(self._lifting()):
            cand = up[cur]
            move = lev[cand] >= c
            cur = np.where(move, cand, cur)
        out = np.full(self.n_r, -1, dtype=np.int64)
        out[np.flatnonzero(ok)] = cur
        return out


def _collapse(parent: list[int], level: list[int], n_r: int) -> tuple[list[int], list[int]]:
    n = len(parent)
    nkids = [0] * n
    for p in parent:
        if p != NO_PARENT:
            nkids[p] += 1
    drop = [v >= n_r and nkids[v] < 2 for v in range(n)]

    def lift(p: int) -> int:
        while p != NO_PARENT and drop[p]:
            p = parent[p]
        return p

    new_parent = [lift(p) if p != NO_PARENT else p for p in parent]
    keep = [v for v in range(n) if not drop[v]]
    remap = {v: i for i, v in enumerate(keep)}
    return (
        [remap[new_parent[v]] if new_parent[v] != NO_PARENT else NO_PARENT for v in keep],
        [level[v] for v in keep],
    )


def _canonical(parent: list[int], level: list[int], n_r: int) -> tuple[list[int], list[int]]:
    """Renumber internal nodes by (level, smallest leaf below) for stable output."""
    n = len(parent)
    minleaf = list(range(n_r)) + [n_r] * (n - n_r)
    internal = sorted(range(n_r, n), key=lambda v: -level[v])
    for v in range(n_r):
        p = parent[v]
        if p != NO_PARENT and v < minleaf[p]:
            minleaf[p] = v
    for v in internal:
        p = parent[v]
        if p != NO_PARENT and minleaf[v] < minleaf[p]:
            minleaf[p] = minleaf[v]
    order = sorted(range(n_r, n), key=lambda v: (level[v], minleaf[v], v))
    remap = list(range(n))
    for i, v in enumerate(order):
        remap[v] = n_r + i
    new_parent = [NO_PARENT] * n
    new_level = [0] * n
    for v in range(n):
        w = remap[v]
        new_parent[w] = remap[parent[v]] if parent[v] != NO_PARENT else NO_PARENT
        new_level[w] = level[v]
    return new_parent, new_level


def build_tree(
    parent: Sequence[int],
    level: Sequence[int],
    n_r: int,
    *,
    r: int = 0,
    s: int = 0,
    leaf_vertices: list[tuple[int, ...]] | None = None,
    collapse: bool = True,
) -> HierarchyTree:
    """Finalize raw builder output into a validated, canonically numbered tree."""
    par, lev = list(parent), list(level)
    if collapse:
        par, lev = _collapse(par, lev, n_r)
    par, lev = _canonical(par, lev, n_r)
    tree = HierarchyTree(
        n_r,
        np.asarray(par, dtype=np.int64),
        np.asarray(lev, dtype=np.int64),
        r,
        s,
        leaf_vertices,
    )
    tree.validate()
    return tree


def edge_density(g: Graph, vertices: Sequence[int]) -> tuple[float, bool]:
    """Induced edges over C(|V|, 2); ``(1.0, False)`` when fewer than two vertices."""
    k = len(set(int(v) for v in vertices))
    if k < 2:
        return 1.0, False
    return g.induced_edge_count(vertices) / comb(k, 2), True


def _vertices_of(tree: HierarchyTree, members: np.ndarray) -> np.ndarray | None:
    if tree.leaf_vertices is None:
        return None
    lv = tree.leaf_vertices
    return np.unique(np.fromiter((v for m in members.tolist() for v in lv[m]), dtype=np.int64))


def cut(tree: HierarchyTree, c: int, graph: Graph | None = None) -> list[Nucleus]:
    """All c-nuclei: one per maximal subtree whose root has level >= c.

    Results are ordered by their smallest member id.
    """
    if c < 1 or c > tree.k_max:
        warnings.warn(f"cut level {c} outside [1, {tree.k_max}]; no nuclei", stacklevel=2)
        return []
    top = tree.top_at(c)
    ids = np.flatnonzero(top >= 0)
    tops = top[ids]
    order = np.argsort(tops, kind="stable")
    ids, tops = ids[order], tops[order]
    bounds = np.flatnonzero(np.diff(tops)) + 1
    groups = np.split(ids, bounds)
    nuclei = []
    for grp in groups:
        node = int(top[grp[0]])
        nuc = Nucleus(c, grp, int(tree.level[node]), _vertices_of(tree, grp))
        if graph is not None and nuc.vertices is not None:
            nuc.edge_density, nuc.density_defined = edge_density(graph, nuc.vertices.tolist())
        nuclei.append(nuc)
    nuclei.sort(key=lambda x: int(x.members[0]))
    return nuclei


def partition_at(tree: HierarchyTree, c: int) -> set[frozenset[int]]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return {frozenset(n.members.tolist()) for n in cut(tree, c)}


def nuclei_from_coreness(engine, coreness: Sequence[int], c: int) -> list[np.ndarray]:
    """Recompute c-nuclei from scratch: connectivity of r-cliques with coreness
    >= c over s-cliques made only of such r-cliques."""
    n_r = len(coreness)
    alive = [x >= c for x in coreness]
    uf = UnionFind(n_r)
    for R in range(n_r):
        if not alive[R]:
            continue
        for others in engine.containing(R):
            if all(alive[o] for o in others):
                for o in others:
                    if o > R:
                        uf.unite(R, o)
    groups: dict[int, list[int]] = {}
    for R in range(n_r):
        if alive[R]:
            groups.setdefault(uf.find(R), []).append(R)
    return [np.asarray(g, dtype=np.int64) for g in groups.values()]


# -- serialization ------------------------------------------------------------


def export_tree(tree: HierarchyTree, sink: IO[str]) -> None:
    """Write ``node_id parent_id level payload`` lines after a header.

    Leaf payloads are comma-joined vertex ids (or the r-clique id when vertices
    are unknown); internal nodes use ``-``. A synthetic level-0 root is added
    when the tree is a forest.
    """
    roots = tree.roots
    n = tree.num_nodes
    synthetic = len(roots) > 1
    parent = tree.parent.copy()
    if synthetic:
        parent[roots] = n
    sink.write(f"# r={tree.r} s={tree.s} n_r={tree.n_r} k_max={tree.k_max}\n")
    lv = tree.leaf_vertices
    for v, (p, lev) in enumerate(zip(parent.tolist(), tree.level.tolist())):
        if v < tree.n_r:
            payload = ",".join(map(str, lv[v])) if lv is not None else f"@{v}"
        else:
            payload = "-"
        sink.write(f"{v} {p} {lev} {payload}\n")
    if synthetic:
        sink.write(f"{n} {NO_PARENT} 0 -\n")


def import_tree(source: IO[str]) -> HierarchyTree:
    header: dict[str, str] = {}
    rows: list[tuple[int, int, int, str]] = []
    for lineno, line in enumerate(source, start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                k, _, v = tok.partition("=")
                header[k] = v
            continue
        parts = line.split()
        if len(parts) != 4:
            raise TreeError(f"line {lineno}: expected 4 fields")
        rows.append((int(parts[0]), int(parts[1]), int(parts[2]), parts[3]))
    try:
        n_r = int(header["n_r"])
    except (KeyError, ValueError):
        raise TreeError("missing n_r in header") from None
    rows.sort()
    if [row[0] for row in rows] != list(range(len(rows))):
        raise TreeError("node ids must be 0..N-1")
    n = len(rows)
    synthetic = None
    if n > n_r and rows[-1][1] == NO_PARENT and rows[-1][2] == 0 and rows[-1][3] == "-":
        synthetic = n - 1
    parent, level = [], []
    leaf_vertices: list[tuple[int, ...]] | None = []
    for node, p, lev, payload in rows:
        if node == synthetic:
            continue
        parent.append(NO_PARENT if p == synthetic else p)
        level.append(lev)
        if node < n_r:
            if payload.startswith("@") or leaf_vertices is None:
                leaf_vertices = None
            else:
                leaf_vertices.append(tuple(int(x) for x in payload.split(",")))
    tree = HierarchyTree(
        n_r,
        np.asarray(parent, dtype=np.int64),
        np.asarray(level, dtype=np.int64),
        int(header.get("r", 0)),
        int(header.get("s", 0)),
        leaf_vertices,
    )
    tree.validate()
    return tree


def write_nuclei_report(sink: IO[str], nuclei: Sequence[Nucleus], density: bool = False) -> None:
    sink.write("level,num_r_cliques,num_vertices,edge_density\n")
    for nuc in nuclei:
        nv = len(nuc.vertices) if nuc.vertices is not None else 0
        dens = f"{nuc.edge_density:.6f}" if density and nuc.edge_density is not None else ""
        sink.write(f"{nuc.level},{nuc.num_r_cliques},{nv},{dens}\n")
