"""Graph ingestion, compressed adjacency storage and low out-degree orientation."""

from __future__ import annotations

import heapq
import io
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable

import numpy as np

# "NUCGRAPH" with the low byte replaced by the format version.
BINARY_MAGIC = 0x4E55434752415001
_HEADER = struct.Struct("<qqq")


class GraphFormatError(ValueError):
    """Raised when an edge list or binary cache cannot be parsed."""

    def __init__(self, message: str, lineno: int | None = None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


@dataclass(eq=False)
class Graph:
    """Immutable undirected simple graph in CSR form.

    ``offsets`` has length ``n + 1`` and ``neighbors[offsets[v]:offsets[v+1]]``
    is the strictly ascending neighbor list of ``v``.
    """

    offsets: np.ndarray
    neighbors: np.ndarray
    _adj: list[list[int]] | None = field(default=None, repr=False)
    _adj_sets: list[frozenset[int]] | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.offsets) - 1

    @property
    def m(self) -> int:
        return len(self.neighbors) // 2

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]] | np.ndarray) -> "Graph":
        """Build a graph on vertices ``[0, n)``; self-loops and duplicates are dropped."""
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        arr = arr.reshape(-1, 2)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ValueError("edge endpoint outside [0, n)")
        u = np.minimum(arr[:, 0], arr[:, 1])
        v = np.maximum(arr[:, 0], arr[:, 1])
        keep = u != v
        keys = np.unique(u[keep] * max(n, 1) + v[keep])
        u, v = keys // max(n, 1), keys % max(n, 1)
        src = np.concatenate([u, v])
        dst = np.concatenate([v, u])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=offsets[1:])
        return cls(offsets, dst.astype(np.int64))

    def degree(self, v: int) -> int:
        return int(self.offsets[v + 1] - self.offsets[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    @property
    def adj(self) -> list[list[int]]:
        """Neighbor lists as plain Python lists (cached; fast to iterate)."""
        if self._adj is None:
            flat = self.neighbors.tolist()
            off = self.offsets.tolist()
            self._adj = [flat[off[v]:off[v + 1]] for v in range(self.n)]
        return self._adj

    @property
    def adj_sets(self) -> list[frozenset[int]]:
        if self._adj_sets is None:
            self._adj_sets = [frozenset(a) for a in self.adj]
        return self._adj_sets

    def has_edge(self, u: int, v: int) -> bool:
        lo, hi = self.offsets[u], self.offsets[u + 1]
        i = np.searchsorted(self.neighbors[lo:hi], v)
        return bool(i < hi - lo and self.neighbors[lo + i] == v)

    def edges(self) -> np.ndarray:
        """Undirected edges ``(u, v)`` with ``u < v`` in lexicographic order."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees())
        mask = src < self.neighbors
        return np.stack([src[mask], self.neighbors[mask]], axis=1)

    def induced_edge_count(self, vertices: Iterable[int]) -> int:
        vs = set(int(v) for v in vertices)
        adj = self.adj
        return sum(1 for u in vs for w in adj[u] if w > u and w in vs)


@dataclass(eq=False)
class OrientedGraph:
    """Acyclic orientation of a graph: every edge points from lower to higher rank."""

    base: Graph
    rank: np.ndarray
    out: list[list[int]]
    max_outdeg: int
    _out_sets: list[frozenset[int]] | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def out_sets(self) -> list[frozenset[int]]:
        if self._out_sets is None:
            self._out_sets = [frozenset(o) for o in self.out]
        return self._out_sets

    def out_degrees(self) -> np.ndarray:
        return np.fromiter((len(o) for o in self.out), dtype=np.int64, count=self.n)


def _relabel_first_appearance(flat: np.ndarray) -> tuple[np.ndarray, int]:
    uniq, first, inverse = np.unique(flat, return_index=True, return_inverse=True)
    # new id of each distinct original label = order of first occurrence
    new_of_uniq = np.empty(len(uniq), dtype=np.int64)
    new_of_uniq[np.argsort(first, kind="stable")] = np.arange(len(uniq), dtype=np.int64)
    return new_of_uniq[inverse], len(uniq)


def load_edge_list(stream: IO[str] | str | Path, *, return_labels: bool = False):
    """Parse a SNAP-style edge list.

    Lines starting with ``#`` (and blank lines) are skipped; every other line
    must begin with two integer vertex ids. Vertices are relabeled to
    ``[0, n)`` in order of first appearance.
    """
    if isinstance(stream, (str, Path)):
        with open(stream, "r", encoding="utf-8") as fh:
            return load_edge_list(fh, return_labels=return_labels)

    flat: list[int] = []
    for lineno, line in enumerate(stream, start=1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if len(parts) < 2:
            raise GraphFormatError(f"expected two vertex ids, got {line.strip()!r}", lineno)
        try:
            flat.append(int(parts[0]))
            flat.append(int(parts[1]))
        except ValueError:
            raise GraphFormatError(f"non-integer vertex id in {line.strip()!r}", lineno) from None

    arr = np.asarray(flat, dtype=np.int64)
    if arr.size == 0:
        g = Graph.from_edges(0, np.empty((0, 2), dtype=np.int64))
        return (g, np.empty(0, dtype=np.int64)) if return_labels else g
    relabeled, n = _relabel_first_appearance(arr)
    g = Graph.from_edges(n, relabeled.reshape(-1, 2))
    if return_labels:
        labels = np.empty(n, dtype=np.int64)
        labels[relabeled] = arr
        return g, labels
    return g


def parse_edge_list(text: str) -> Graph:
    return load_edge_list(io.StringIO(text))


def save_binary(g: Graph, path: str | Path) -> None:
    """Write the versioned little-endian int64 adjacency cache."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(BINARY_MAGIC, g.n, g.m))
        fh.write(g.offsets.astype("<i8").tobytes())
        fh.write(g.neighbors.astype("<i8").tobytes())


def load_binary(path: str | Path) -> Graph:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise GraphFormatError("binary cache truncated")
    magic, n, m = _HEADER.unpack_from(data)
    if magic != BINARY_MAGIC:
        raise GraphFormatError(f"bad magic {magic:#x} (expected {BINARY_MAGIC:#x})")
    body = np.frombuffer(data, dtype="<i8", offset=_HEADER.size)
    if len(body) != (n + 1) + 2 * m:
        raise GraphFormatError("binary cache size does not match header")
    return Graph(body[: n + 1].astype(np.int64), body[n + 1 :].astype(np.int64))


def load_graph(path: str | Path) -> Graph:
    """Load either a binary cache (by magic) or a text edge list."""
    with open(path, "rb") as fh:
        head = fh.read(8)
    if len(head) == 8 and struct.unpack("<q", head)[0] == BINARY_MAGIC:
        return load_binary(path)
    return load_edge_list(path)


def degeneracy_order(g: Graph) -> tuple[list[int], int]:
    """Exact degeneracy ordering by repeated min-degree removal, ties by vertex id.

    Returns the removal order and the degeneracy.
    """
    adj = g.adj
    deg = [len(a) for a in adj]
    heap = [(d, v) for v, d in enumerate(deg)]
    heapq.heapify(heap)
    removed = [False] * g.n
    order: list[int] = []
    degeneracy = 0
    while heap:
        d, v = heapq.heappop(heap)
        if removed[v] or d != deg[v]:
            continue
        removed[v] = True
        order.append(v)
        if d > degeneracy:
            degeneracy = d
        for w in adj[v]:
            if not removed[w]:
                deg[w] -= 1
                heapq.heappush(heap, (deg[w], w))
    return order, degeneracy


def orient(g: Graph) -> OrientedGraph:
    """Direct every edge from lower to higher position in the degeneracy order."""
    order, _ = degeneracy_order(g)
    rank = np.empty(g.n, dtype=np.int64)
    rank[np.asarray(order, dtype=np.int64)] = np.arange(g.n, dtype=np.int64)
    rk = rank.tolist()
    out = [[w for w in nbrs if rk[w] > rk[v]] for v, nbrs in enumerate(g.adj)]
    max_outdeg = max((len(o) for o in out), default=0)
    return OrientedGraph(g, rank, out, max_outdeg)
