"""Approximate coreness with geometrically growing buckets.

Bucket ``i`` spans degrees ``[(C+d)(1+d)^i, (C+d)(1+d)^(i+1))`` where
``C = binom(s, r)`` and ``d`` is ``delta``. Each bucket is re-peeled at most
``round_cap`` times before its survivors are carried into the next one, which
bounds the number of rounds by a polylogarithm of ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._parallel import WorkerPool
from .cliques import CliqueEngine, SCliqueCounts
from .peel import UNPEELED, LinkFn, process_round


class ConfigError(ValueError):
    pass


def default_round_cap(n: int, fanout: int, delta: float) -> int:
    if n < 2:
        return 1
    return max(1, math.ceil(math.log(n) / math.log1p(delta / fanout)))


@dataclass
class ApproxConfig:
    delta: float
    round_cap: int | None = None
    # min(bucket upper bound, original degree); False reports the raw bound
    refine: bool = True

    def __post_init__(self) -> None:
        if not (isinstance(self.delta, (int, float)) and self.delta > 0 and math.isfinite(self.delta)):
            raise ConfigError(f"delta must be a positive finite number, got {self.delta!r}")
        if self.round_cap is not None and self.round_cap < 1:
            raise ConfigError("round_cap must be >= 1")


class GeometricBuckets:
    def __init__(self, fanout: int, delta: float):
        self.base = fanout + delta
        self.ratio = 1.0 + delta

    def lower(self, i: int) -> float:
        return self.base * self.ratio**i

    def upper(self, i: int) -> float:
        return self.base * self.ratio ** (i + 1)

    def index(self, degree: int) -> int:
        """Bucket of a degree; everything below the first upper bound maps to 0."""
        if degree < self.upper(0):
            return 0
        i = int(math.floor(math.log(degree / self.base) / math.log(self.ratio)))
        while i > 0 and self.lower(i) > degree:
            i -= 1
        while self.upper(i) <= degree:
            i += 1
        return i

    def value(self, i: int) -> int:
        """Integer coreness estimate for bucket ``i``: floor of its upper bound."""
        return int(math.floor(self.upper(i)))


@dataclass(eq=False)
class ApproxResult:
    approx_coreness: list[int]
    rounds: int
    round_cap: int
    bucket_of: list[int]
    round_of: list[int]
    delta: float

    @property
    def k_max(self) -> int:
        return max(self.approx_coreness, default=0)

    @property
    def coreness(self) -> list[int]:
        return self.approx_coreness


def round_bound(n: int, r: int, s: int, delta: float) -> float:
    """s * log_{1+d}(n) * ceil(log_{1+d/C}(n)): the polylog sub-round budget."""
    if n < 2:
        return 0.0
    fanout = math.comb(s, r)
    return s * math.log(n) / math.log1p(delta) * default_round_cap(n, fanout, delta)


def peel_approx(
    engine: CliqueEngine,
    counts: SCliqueCounts,
    cfg: ApproxConfig,
    link: LinkFn | None = None,
    threads: int | None = 1,
) -> ApproxResult:
    n_r = engine.idx.n_r
    geo = GeometricBuckets(engine.fanout, cfg.delta)
    cap = cfg.round_cap or default_round_cap(engine.og.n, engine.fanout, cfg.delta)

    orig = counts.counts
    cnt = list(orig)
    pos = [geo.index(c) for c in cnt]
    buckets: dict[int, list[int]] = {}
    for rid, b in enumerate(pos):
        buckets.setdefault(b, []).append(rid)

    values = [0] * n_r
    bucket_of = [0] * n_r
    round_of = [UNPEELED] * n_r
    finished = 0
    rounds = 0
    sub = 0
    i = min(buckets, default=0)
    with WorkerPool(threads) as pool:
        while finished < n_r:
            lst = buckets.pop(i, None) or []
            batch = sorted({x for x in lst if round_of[x] == UNPEELED and pos[x] == i})
            if not batch:
                i = min(buckets)
                sub = 0
                continue
            rounds += 1
            sub += 1
            finished += len(batch)
            raw = geo.value(i)
            for R in batch:
                round_of[R] = rounds
                bucket_of[R] = i
                if orig[R] == 0:
                    values[R] = 0
                else:
                    values[R] = min(raw, orig[R]) if cfg.refine else raw
            delta = process_round(engine, batch, rounds, round_of, values, link, pool)
            for rid, d in delta.items():
                c = cnt[rid] - d
                cnt[rid] = c
                # never rebucket below the bucket being processed
                b = geo.index(c)
                if b < i:
                    b = i
                if b != pos[rid]:
                    pos[rid] = b
                    buckets.setdefault(b, []).append(rid)
            if sub >= cap:
                carried = buckets.pop(i, None) or []
                nxt = buckets.setdefault(i + 1, [])
                for x in carried:
                    if round_of[x] == UNPEELED and pos[x] == i:
                        pos[x] = i + 1
                        nxt.append(x)
                i += 1
                sub = 0
    return ApproxResult(values, rounds, cap, bucket_of, round_of, cfg.delta)
