"""Acceptance criteria, one test per criterion; each records a PASS/FAIL line
that is printed in the terminal summary."""

from __future__ import annotations

import io
import math
import os
import time

import numpy as np
import pytest

from conftest import PAIRS, record
from nucleus import oracle
from nucleus.approx import ApproxConfig, peel_approx, round_bound
from nucleus.builders import ALGOS, EfficientLinker, finish_tree, make_builder
from nucleus.generators import chung_lu, nested_cores_graph
from nucleus.peel import peel, write_coreness
from nucleus.pipeline import decompose
from nucleus.tree import build_tree, cut, export_tree, nuclei_from_coreness, partition_at

DELTAS = (0.1, 0.5, 1.0)


def test_c1_oracle_exactness(corpus):
    start = time.perf_counter()
    checked = 0
    bad = []
    for case in corpus.cases:
        for r, s in PAIRS:
            eng = case.engine(r, s)
            got = peel(eng, eng.count()).coreness
            want = corpus.oracle(case, r, s).coreness
            checked += 1
            if got != want:
                bad.append((case.seed, r, s))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 600
    record("C1", "oracle exactness", ok, f"{checked} (graph, r, s) cases, {len(bad)} mismatches, {elapsed:.1f}s")
    assert not bad, bad[:5]
    assert elapsed < 600


def test_c2_hierarchy_equivalence(corpus):
    bad = []
    levels = 0
    for case in corpus.cases:
        for r, s in PAIRS:
            orc = corpus.oracle(case, r, s)
            want = orc.partitions()
            eng = case.engine(r, s)
            counts = eng.count()
            for algo in ALGOS:
                b = make_builder(algo, eng.idx.n_r)
                res = peel(eng, counts, b.link)
                tree = finish_tree(b, eng, res.coreness)
                for c, part in want.items():
                    levels += 1
                    if partition_at(tree, c) != part:
                        bad.append((case.seed, r, s, algo, c))
    ok = not bad
    record("C2", "hierarchy equivalence te/el/bl vs oracle", ok, f"{levels} level cuts compared, {len(bad)} mismatches")
    assert not bad, bad[:5]


# -- criterion 3: the labelled example ----------------------------------------

# ids chosen so that 3b, the minimum id of {3a, 3b, 3c}, becomes its representative
NAMES = ["1a", "2a", "3b", "3a", "3c", "4a", "4b", "4c", "4d"]
ID = {name: i for i, name in enumerate(NAMES)}
CORE = [1, 2, 3, 3, 3, 4, 4, 4, 4]


def _uf_blocks(el: EfficientLinker) -> set[frozenset[str]]:
    groups: dict[int, set[str]] = {}
    for name, i in ID.items():
        groups.setdefault(el.uf.find(i), set()).add(name)
    return {frozenset(g) for g in groups.values()}


def _resolved_L(el: EfficientLinker) -> dict[frozenset[str], frozenset[str]]:
    """Nearest-core table at component level: set of root -> set of target."""
    blocks = {el.uf.find(i): set() for i in range(len(NAMES))}
    for name, i in ID.items():
        blocks[el.uf.find(i)].add(name)
    out = {}
    for root, members in blocks.items():
        target = el.L[root]
        if target is not None:
            out[frozenset(members)] = frozenset(blocks[el.uf.find(target)])
    return out


def _fs(*names: str) -> frozenset[str]:
    return frozenset(names)


def _scripted_linker() -> tuple[EfficientLinker, list[bool]]:
    el = EfficientLinker(len(NAMES))
    checks = []

    def link(a: str, b: str) -> None:
        el.link(ID[a], ID[b], CORE)

    # state after round 3
    link("1a", "3a")
    checks.append(el.L.as_dict() == {ID["3a"]: ID["1a"]} and len(_uf_blocks(el)) == 9)
    # intermediate calls in round 4
    link("3a", "4c")
    checks.append(el.L[ID["4c"]] == ID["3a"])
    link("3b", "4c")
    checks.append(el.uf.find(ID["3a"]) == ID["3b"] and el.L[ID["3b"]] == ID["1a"])
    link("2a", "4c")
    checks.append(el.L[ID["3b"]] == ID["2a"] and el.L[ID["2a"]] == ID["1a"])
    for a, b in [
        ("3a", "4a"), ("3b", "4a"), ("3c", "4a"),
        ("3a", "4b"), ("3b", "4b"), ("3c", "4b"),
        ("3c", "4c"), ("2a", "4d"),
    ]:
        link(a, b)
    return el, checks


def test_c3_worked_example():
    details = []
    # core numbers on the realized graph
    g, labels = nested_cores_graph()
    d = decompose(g, 1, 3, "el")
    expected = {"1a": 1, "2a": 2, "3a": 3, "3b": 3, "3c": 3, "4a": 4, "4b": 4, "4c": 4, "4d": 4}
    cores_ok = all(d.coreness[labels[k]] == v for k, v in expected.items())
    cores_ok &= d.coreness == oracle.oracle_peel(g, 1, 3).coreness
    details.append(f"cores={'ok' if cores_ok else 'bad'}")

    # trajectory of uf / L under the scripted link order
    el, steps = _scripted_linker()
    traj_ok = all(steps)
    three = _fs("3a", "3b", "3c")
    want_L = {
        _fs("2a"): _fs("1a"),
        three: _fs("2a"),
        _fs("4a"): three,
        _fs("4b"): three,
        _fs("4c"): three,
        _fs("4d"): _fs("2a"),
    }
    final_ok = _uf_blocks(el) == {three} | {_fs(n) for n in NAMES if n not in three}
    final_ok &= _resolved_L(el) == want_L
    details.append(f"trajectory={'ok' if traj_ok and final_ok else 'bad'}")

    # final tree, before and after single-child collapse
    def leaf_sets(tree):
        kids = tree.children()
        below: dict[int, frozenset[str]] = {}

        def collect(v: int) -> frozenset[str]:
            if v < tree.n_r:
                return _fs(NAMES[v])
            if v not in below:
                below[v] = frozenset().union(*(collect(k) for k in kids[v]))
            return below[v]

        return {(int(tree.level[v]), collect(v)) for v in range(tree.n_r, tree.num_nodes)}

    parent, level = el.construct(None, CORE)
    verts = [(i,) for i in range(len(NAMES))]
    stage = build_tree(parent, level, len(NAMES), r=1, s=3, leaf_vertices=verts, collapse=False)
    final = build_tree(parent, level, len(NAMES), r=1, s=3, leaf_vertices=verts)
    everything = frozenset(NAMES)
    two_core = everything - {"1a"}
    three_core = three | _fs("4a", "4b", "4c")
    tree_ok = leaf_sets(stage) == {
        (1, everything), (2, two_core), (3, three_core),
        (4, _fs("4a")), (4, _fs("4b")), (4, _fs("4c")), (4, _fs("4d")),
    }
    tree_ok &= leaf_sets(final) == {(1, everything), (2, two_core), (3, three_core)}
    buf = io.StringIO()
    export_tree(final, buf)
    lines = buf.getvalue().splitlines()
    tree_ok &= len(lines) == 13
    details.append(f"tree={'ok' if tree_ok else 'bad'} export_lines={len(lines)}")

    # nuclei on the realized graph for every builder
    orc = oracle.oracle_peel(g, 1, 3)
    nuclei_ok = True
    for algo in ALGOS:
        t = decompose(g, 1, 3, algo).tree
        nuclei_ok &= all(partition_at(t, c) == oracle.oracle_nuclei(orc, c) for c in range(1, 5))
    c2 = oracle.oracle_nuclei(orc, 2)
    core2 = {labels[k] for k in ("2a", "3a", "3b", "3c", "4a", "4b", "4c", "4d")}
    nuclei_ok &= any(core2 <= block for block in c2) and len(c2) == 1
    details.append(f"nuclei={'ok' if nuclei_ok else 'bad'}")

    ok = cores_ok and traj_ok and final_ok and tree_ok and nuclei_ok
    record("C3", "worked example (cores, uf/L trajectory, tree)", ok, " ".join(details))
    assert cores_ok and traj_ok and final_ok and tree_ok and nuclei_ok, details


def test_c4_approximation_sandwich(corpus, collab):
    violations = []
    checked = 0
    for case in corpus.cases:
        for r, s in PAIRS:
            exact = corpus.oracle(case, r, s).coreness
            eng = case.engine(r, s)
            counts = eng.count()
            C = math.comb(s, r)
            for delta in DELTAS:
                approx = peel_approx(eng, counts, ApproxConfig(delta)).approx_coreness
                gamma = (C + delta) * (1 + delta)
                for k, a in zip(exact, approx):
                    checked += 1
                    if k >= 1 and not (k <= a <= gamma * k):
                        violations.append((case.seed, r, s, delta, k, a))
                    if k == 0 and a != 0:
                        violations.append((case.seed, r, s, delta, k, a))
    ex = np.asarray(decompose(collab, 2, 3, build_tree=False).coreness)
    ap = np.asarray(decompose(collab, 2, 3, delta=0.1, build_tree=False).coreness)
    mask = ex >= 1
    median = float(np.median(ap[mask] / ex[mask]))
    big_ok = bool(np.all(ex[mask] <= ap[mask]) and np.all(ap[mask] <= (3 + 0.1) * 1.1 * ex[mask]))
    ok = not violations and big_ok and median <= 2.0
    record(
        "C4",
        "approximation sandwich + median error",
        ok,
        f"{checked} corpus values, {len(violations)} violations; "
        f"collaboration graph m={collab.m} (2,3) d=0.1 median error {median:.3f}x",
    )
    assert not violations, violations[:5]
    assert big_ok
    assert median <= 2.0


def test_c5_determinism(collab):
    threads = sorted({1, 2, os.cpu_count() or 1, 4})
    digests = {}
    ok = True
    for algo in ALGOS:
        outs = set()
        for t in threads:
            d = decompose(collab, 2, 3, algo, threads=t)
            buf = io.StringIO()
            write_coreness(buf, d.idx, d.coreness, 3)
            tree_buf = io.StringIO()
            export_tree(d.tree, tree_buf)
            outs.add((buf.getvalue(), tree_buf.getvalue()))
        digests[algo] = len(outs)
        ok &= len(outs) == 1
    record("C5", "determinism across thread counts", ok, f"threads={threads} distinct outputs per algo={digests}")
    assert ok, digests


def test_c6_handshake_identity(corpus, collab):
    import networkx as nx

    bad = []
    for case in corpus.cases:
        for r, s in PAIRS:
            counts = case.engine(r, s).count()
            n_s = len(oracle.all_cliques(case.g, s))
            if sum(counts.counts) != math.comb(s, r) * n_s or counts.n_s != n_s:
                bad.append((case.seed, r, s))
    G = nx.Graph(collab.edges().tolist())
    triangles = sum(nx.triangles(G).values()) // 3
    big = decompose(collab, 2, 3, build_tree=False)
    big_ok = sum(big.result.degrees) == 3 * triangles
    ok = not bad and big_ok
    record("C6", "handshake identity", ok, f"{len(bad)} corpus mismatches; collaboration graph triangles={triangles}")
    assert not bad, bad[:5]
    assert big_ok


@pytest.mark.slow
def test_c7_query_speedup():
    g = chung_lu(200_000, 1_000_000, seed=7)
    d = decompose(g, 1, 2, "el")
    cs = sorted({int(c) for c in np.linspace(1, d.k_max, 10).round()})
    t = time.perf_counter()
    via_tree = [cut(d.tree, c) for c in cs]
    t_tree = time.perf_counter() - t
    t = time.perf_counter()
    recomputed = [nuclei_from_coreness(d.engine, d.coreness, c) for c in cs]
    t_re = time.perf_counter() - t
    equal = all(
        {frozenset(n.members.tolist()) for n in a} == {frozenset(x.tolist()) for x in b}
        for a, b in zip(via_tree, recomputed)
    )
    speedup = t_re / t_tree
    ok = equal and speedup >= 5.0 and len(cs) == 10
    record(
        "C7",
        "query speedup via stored tree",
        ok,
        f"m={g.m} (1,2) c values={len(cs)} tree={t_tree:.3f}s recompute={t_re:.3f}s speedup={speedup:.1f}x",
    )
    assert equal
    assert len(cs) == 10
    assert speedup >= 5.0


def test_c8_round_bound(corpus, collab):
    bad = []
    cases = 0
    for case in corpus.cases:
        for r, s in PAIRS:
            eng = case.engine(r, s)
            counts = eng.count()
            for delta in DELTAS:
                res = peel_approx(eng, counts, ApproxConfig(delta))
                cases += 1
                if res.rounds > round_bound(case.g.n, r, s, delta):
                    bad.append((case.seed, r, s, delta, res.rounds))
    big = []
    for delta in DELTAS:
        res = decompose(collab, 2, 3, delta=delta, build_tree=False)
        cases += 1
        big.append(res.rounds)
        if res.rounds > round_bound(collab.n, 2, 3, delta):
            bad.append(("collab", 2, 3, delta, res.rounds))
    ok = not bad
    record("C8", "approximate round bound", ok, f"{cases} runs, {len(bad)} over bound; collaboration rounds={big}")
    assert not bad, bad[:5]


def test_c9_operation_accounting(collab):
    el = decompose(collab, 2, 3, "el")
    bl = decompose(collab, 2, 3, "bl")
    ops_el = el.unites + el.links
    ops_bl = bl.unites + bl.links
    ok = ops_bl > ops_el
    record(
        "C9",
        "bl performs more unite+link than el",
        ok,
        f"bl={ops_bl} el={ops_el} ratio={ops_bl / max(ops_el, 1):.2f}x (unites bl={bl.unites} el={el.unites})",
    )
    assert ok
