"""End-to-end decomposition: orient, index, count, peel, build the tree."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from ._parallel import WorkerPool, resolve_threads
from .approx import ApproxConfig, ApproxResult, peel_approx
from .builders import finish_tree, make_builder
from .cliques import CliqueEngine, RCliqueIndex, index_r_cliques
from .graph import Graph, orient
from .peel import PeelResult, peel
from .tree import HierarchyTree


@dataclass(eq=False)
class Decomposition:
    r: int
    s: int
    algo: str
    idx: RCliqueIndex
    engine: CliqueEngine
    coreness: list[int]
    result: PeelResult | ApproxResult
    tree: HierarchyTree | None
    n_s: int
    times: dict[str, float] = field(default_factory=dict)
    unites: int = 0
    links: int = 0
    approx_delta: float | None = None

    @property
    def k_max(self) -> int:
        return max(self.coreness, default=0)

    @property
    def rounds(self) -> int:
        return self.result.rounds


def decompose(
    g: Graph,
    r: int,
    s: int,
    algo: str = "el",
    *,
    delta: float | None = None,
    threads: int | None = 1,
    build_tree: bool = True,
    collapse: bool = True,
) -> Decomposition:
    """Run the full pipeline; ``delta`` switches to approximate peeling."""
    if not 1 <= r < s:
        raise ValueError(f"need 1 <= r < s, got r={r} s={s}")
    cfg = ApproxConfig(delta) if delta is not None else None
    threads = resolve_threads(threads)
    times: dict[str, float] = {}

    t = time.perf_counter()
    og = orient(g)
    idx = index_r_cliques(og, r)
    engine = CliqueEngine(og, idx, s)
    times["orient"] = time.perf_counter() - t

    t = time.perf_counter()
    with WorkerPool(threads) as pool:
        counts = engine.count(pool)
    times["count"] = time.perf_counter() - t

    builder = make_builder(algo, idx.n_r) if build_tree else None
    link = builder.link if builder is not None else None
    t = time.perf_counter()
    if cfg is None:
        result: PeelResult | ApproxResult = peel(engine, counts, link, threads)
        values = result.coreness
    else:
        result = peel_approx(engine, counts, cfg, link, threads)
        values = result.approx_coreness
    times["peel"] = time.perf_counter() - t

    tree = None
    t = time.perf_counter()
    if builder is not None:
        tree = finish_tree(builder, engine, values, collapse=collapse)
    times["tree"] = time.perf_counter() - t

    return Decomposition(
        r,
        s,
        algo,
        idx,
        engine,
        values,
        result,
        tree,
        counts.n_s,
        times,
        builder.unites.value if builder is not None else 0,
        builder.links.value if builder is not None else 0,
        delta,
    )
