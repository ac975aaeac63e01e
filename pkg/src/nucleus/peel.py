"""Exact (r, s)-clique core numbers by bucketed parallel peeling.

Each round extracts every unpeeled r-clique in the minimum bucket, walks the
s-cliques that contain them, aggregates count decrements for unpeeled
members, and reports fully peeled s-cliques to an optional link callback
used for hierarchy construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Callable, Sequence

from ._parallel import WorkerPool
from .cliques import CliqueEngine, RCliqueIndex, SCliqueCounts

UNPEELED = -1

LinkFn = Callable[[int, int, Sequence[int]], None]


class BucketStructure:
    """Array-of-buckets keyed by integer s-clique-degree, with lazy deletion.

    Keys never drop below ``cur``, the bucket currently being peeled; once an
    id is extracted its key is frozen and equals its coreness.
    """

    def __init__(self, keys: Sequence[int]):
        self.key = list(keys)
        self.peeled = bytearray(len(self.key))
        self.buckets: dict[int, list[int]] = {}
        for rid, k in enumerate(self.key):
            self.buckets.setdefault(k, []).append(rid)
        self.cur = min(self.key, default=0)
        self.max_key = max(self.key, default=0)

    def extract_min(self) -> tuple[int, list[int]] | None:
        """Remove and return the lowest non-empty bucket ``(key, sorted ids)``."""
        key, peeled = self.key, self.peeled
        while self.cur <= self.max_key:
            lst = self.buckets.pop(self.cur, None)
            if lst:
                cur = self.cur
                ids = sorted({x for x in lst if not peeled[x] and key[x] == cur})
                if ids:
                    for x in ids:
                        peeled[x] = 1
                    return cur, ids
            self.cur += 1
        return None

    def decrement_and_rebucket(self, counts: list[int], batch: dict[int, int]) -> None:
        """Apply aggregated decrements; new key is ``max(count, cur)``."""
        key, cur = self.key, self.cur
        for rid, d in batch.items():
            c = counts[rid] - d
            if c < 0:
                raise AssertionError(f"s-clique count of r-clique {rid} went negative")
            counts[rid] = c
            nk = c if c > cur else cur
            if nk != key[rid]:
                key[rid] = nk
                self.buckets.setdefault(nk, []).append(rid)


@dataclass(eq=False)
class PeelResult:
    coreness: list[int]
    k_max: int
    rounds: int
    round_of: list[int]
    degrees: list[int]


def merge_deltas(parts: list[dict[int, int]]) -> dict[int, int]:
    merged = parts[0]
    for part in parts[1:]:
        for rid, d in part.items():
            merged[rid] = merged.get(rid, 0) + d
    return merged


def process_round(
    engine: CliqueEngine,
    batch: Sequence[int],
    t: int,
    round_of: list[int],
    values: list[int],
    link: LinkFn | None,
    pool: WorkerPool,
) -> dict[int, int]:
    """Walk every s-clique containing a batch member peeled in round ``t``.

    An s-clique that holds an r-clique from an earlier round is already gone.
    A live one is charged once, by its smallest in-round member, as a
    decrement to each of its unpeeled r-cliques.

    Links: an s-clique joins its r-cliques only at the lowest value among
    them, so once its last member is peeled its smallest in-round member links
    every other member to the one with the lowest (value, id).
    """
    containing = engine.containing

    def work(chunk: Sequence[int]) -> dict[int, int]:
        delta: dict[int, int] = {}
        for R in chunk:
            for others in containing(R):
                dead = False
                owner = True
                complete = True
                for o in others:
                    ro = round_of[o]
                    if ro == UNPEELED:
                        complete = False
                    elif ro < t:
                        dead = True
                    elif o < R:
                        owner = False
                if not owner:
                    continue
                if complete and link is not None:
                    low = R
                    for o in others:
                        if values[o] < values[low] or (values[o] == values[low] and o < low):
                            low = o
                    if low != R:
                        link(low, R, values)
                    for o in others:
                        if o != low:
                            link(low, o, values)
                if dead:
                    continue
                for o in others:
                    if round_of[o] == UNPEELED:
                        delta[o] = delta.get(o, 0) + 1
        return delta

    return merge_deltas(pool.map_chunks(work, batch))


def peel(
    engine: CliqueEngine,
    counts: SCliqueCounts,
    link: LinkFn | None = None,
    threads: int | None = 1,
) -> PeelResult:
    """Compute exact coreness.

    ``link(low, R, coreness)`` fires with final values only, once per member
    of each s-clique, pairing it with that s-clique's lowest-coreness member.
    """
    n_r = engine.idx.n_r
    cnt = list(counts.counts)
    nd = BucketStructure(cnt)
    round_of = [UNPEELED] * n_r
    coreness = [0] * n_r
    rounds = 0
    with WorkerPool(threads) as pool:
        while True:
            got = nd.extract_min()
            if got is None:
                break
            k, batch = got
            rounds += 1
            for R in batch:
                round_of[R] = rounds
                coreness[R] = k
            delta = process_round(engine, batch, rounds, round_of, coreness, link, pool)
            nd.decrement_and_rebucket(cnt, delta)
    return PeelResult(coreness, max(coreness, default=0), rounds, round_of, list(counts.counts))


def format_header(r: int, s: int, n_r: int, k_max: int, approx_delta: float | None = None) -> str:
    head = f"# r={r} s={s} n_r={n_r} k_max={k_max}"
    if approx_delta is not None:
        head += f" approx_delta={approx_delta!r}"
    return head


def write_coreness(
    sink: IO[str],
    idx: RCliqueIndex,
    values: Sequence[int],
    s: int,
    approx_delta: float | None = None,
) -> None:
    """Coreness CSV: one header line, then ``v1,...,vr,coreness`` sorted by id."""
    sink.write(format_header(idx.r, s, idx.n_r, max(values, default=0), approx_delta) + "\n")
    for verts, value in zip(idx.verts_of, values):
        sink.write(",".join(map(str, verts)) + f",{value}\n")


def read_coreness(source: IO[str]) -> tuple[dict[str, str], list[tuple[tuple[int, ...], int]]]:
    header: dict[str, str] = {}
    rows = []
    for line in source:
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                k, _, v = tok.partition("=")
                header[k] = v
            continue
        *verts, value = line.split(",")
        rows.append((tuple(int(v) for v in verts), int(value)))
    return header, rows
