from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import pytest

from nucleus import oracle
from nucleus.cliques import CliqueEngine, index_r_cliques
from nucleus.generators import collaboration_graph, gnp
from nucleus.graph import Graph, orient

PAIRS = list(itertools.combinations(range(1, 6), 2))
CORPUS_SIZE = 200

# criterion id -> (title, passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[str, tuple[str, bool, str]] = {}


def corpus_params(seed: int) -> tuple[int, float]:
    return 10 + seed % 31, (0.1, 0.2, 0.3)[seed % 3]


@dataclass(eq=False)
class Case:
    seed: int
    g: Graph

    @cached_property
    def og(self):
        return orient(self.g)

    def engine(self, r: int, s: int) -> CliqueEngine:
        return CliqueEngine(self.og, index_r_cliques(self.og, r), s)


class Corpus:
    def __init__(self) -> None:
        self.cases = [Case(seed, gnp(*corpus_params(seed), seed)) for seed in range(CORPUS_SIZE)]
        self._oracle: dict[tuple[int, int, int], oracle.OracleResult] = {}

    def oracle(self, case: Case, r: int, s: int) -> oracle.OracleResult:
        key = (case.seed, r, s)
        if key not in self._oracle:
            self._oracle[key] = oracle.oracle_peel(case.g, r, s)
        return self._oracle[key]


@pytest.fixture(scope="session")
def corpus() -> Corpus:
    return Corpus()


@pytest.fixture(scope="session")
def collab() -> Graph:
    return collaboration_graph(seed=2024)


def record(cid: str, title: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE[cid] = (title, passed, detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE, key=lambda c: int(c[1:])):
        title, ok, detail = ACCEPTANCE[cid]
        terminalreporter.write_line(f"{cid} {'PASS' if ok else 'FAIL'} {title}: {detail}")
