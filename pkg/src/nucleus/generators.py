"""Seeded test-graph generators."""

from __future__ import annotations

import numpy as np

from .graph import Graph


def gnp(n: int, p: float, seed: int) -> Graph:
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(len(iu)) < p
    return Graph.from_edges(n, np.stack([iu[keep], ju[keep]], axis=1))


def complete_graph(n: int) -> Graph:
    iu, ju = np.triu_indices(n, k=1)
    return Graph.from_edges(n, np.stack([iu, ju], axis=1))


def _octahedron(base: int) -> list[tuple[int, int]]:
    # opposite pairs (0,1), (2,3), (4,5) are the only non-edges
    opposite = {(0, 1), (2, 3), (4, 5)}
    return [
        (base + i, base + j)
        for i in range(6)
        for j in range(i + 1, 6)
        if (i, j) not in opposite
    ]


def nested_cores_graph() -> tuple[Graph, dict[str, int]]:
    """Small graph whose (1,3) cores are 1a=1, 2a=2, 3a/3b/3c=3, blobs=4.

    Each blob a..d is an octahedron (every vertex in four triangles). Blob
    vertex ``4x`` is its slot 0 and ``x2`` its slot 2; the 3-vertices touch
    blobs a, b, c, vertex 2a bridges blobs c and d, and 1a hangs off 3a.
    """
    labels = {"1a": 0, "2a": 1, "3a": 2, "3b": 3, "3c": 4}
    edges: list[tuple[int, int]] = []
    nxt = 5
    for blob in "abcd":
        labels[f"4{blob}"] = nxt
        labels[f"{blob}2"] = nxt + 2
        edges += _octahedron(nxt)
        nxt += 6
    for x in "abc":
        for y in "abc":
            edges.append((labels[f"3{x}"], labels[f"4{y}"]))
            edges.append((labels[f"3{x}"], labels[f"{y}2"]))
    for y in "cd":
        edges.append((labels["2a"], labels[f"4{y}"]))
        edges.append((labels["2a"], labels[f"{y}2"]))
    edges.append((labels["1a"], labels["3a"]))
    edges.append((labels["1a"], labels["a2"]))
    return Graph.from_edges(nxt, edges), labels


def collaboration_graph(
    seed: int,
    authors: int = 40_000,
    papers: int = 25_000,
    communities: int = 400,
    mean_team: float = 3.2,
    max_team: int = 14,
) -> Graph:
    """Co-authorship-like graph: every paper adds a clique on its author team.

    Authors belong to communities; teams are drawn mostly from one community
    with popularity skew, so cliques overlap the way collaboration networks do.
    """
    rng = np.random.default_rng(seed)
    comm_of = rng.integers(0, communities, size=authors)
    members = [np.flatnonzero(comm_of == c) for c in range(communities)]
    popularity = rng.pareto(1.5, size=authors) + 1.0
    edges: list[np.ndarray] = []
    sizes = np.clip(rng.geometric(1.0 / (mean_team - 1.0), size=papers) + 1, 2, max_team)
    home = rng.integers(0, communities, size=papers)
    for size, c in zip(sizes.tolist(), home.tolist()):
        pool = members[c]
        if len(pool) < size:
            continue
        w = popularity[pool]
        team = rng.choice(pool, size=size, replace=False, p=w / w.sum())
        if rng.random() < 0.15:
            # occasional outside collaborator
            team[-1] = rng.integers(0, authors)
        iu, ju = np.triu_indices(size, k=1)
        edges.append(np.stack([team[iu], team[ju]], axis=1))
    return Graph.from_edges(authors, np.concatenate(edges))


def chung_lu(n: int, m: int, seed: int, exponent: float = 2.5) -> Graph:
    """Random graph with power-law expected degrees, about ``m`` distinct edges."""
    rng = np.random.default_rng(seed)
    w = (np.arange(1, n + 1, dtype=np.float64)) ** (-1.0 / (exponent - 1.0))
    p = w / w.sum()
    draws = int(m * 1.08)
    u = rng.choice(n, size=draws, p=p)
    v = rng.choice(n, size=draws, p=p)
    return Graph.from_edges(n, np.stack([u, v], axis=1))
