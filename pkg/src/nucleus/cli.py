"""Command-line interface: decompose, query, bench, generate.

Exit codes: 0 success, 2 usage error, 3 missing/unreadable input or bad
format, 4 out of memory, 5 timeout.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import itertools
import json
import os
import resource
import signal
import subprocess
import sys
import tempfile
import time
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from ._parallel import THREADS_ENV, resolve_threads
from .builders import ALGOS
from .graph import Graph, GraphFormatError, load_graph
from .peel import write_coreness
from .tree import TreeError, cut, export_tree, import_tree, write_nuclei_report

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_OOM = 4
EXIT_TIMEOUT = 5


class UsageError(Exception):
    pass


class Timeout(Exception):
    pass


@dataclass
class RunConfig:
    input: str
    r: int
    s: int
    algo: str = "el"
    approx: bool = False
    delta: float = 0.1
    threads: int | None = None
    cut: int | None = None
    density: bool = False
    out_coreness: str | None = None
    out_tree: str | None = None
    seed: int = 0

    def validate(self) -> None:
        if not 1 <= self.r < self.s:
            raise UsageError(f"need 1 <= r < s (got r={self.r}, s={self.s})")
        if self.algo not in ALGOS:
            raise UsageError(f"--algo must be one of {', '.join(ALGOS)}")
        if self.approx and not self.delta > 0:
            raise UsageError("--delta must be > 0")
        if self.threads is not None and self.threads < 0:
            raise UsageError("--threads must be >= 0")


@contextmanager
def deadline(seconds: float | None):
    if not seconds or seconds <= 0:
        yield
        return

    def on_alarm(signum, frame):
        raise Timeout()

    old = signal.signal(signal.SIGALRM, on_alarm)
    signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


def peak_rss_mb() -> float:
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024.0


@contextmanager
def _stdout():
    yield sys.stdout


def _open_out(path: str | None):
    if path is None or path == "-":
        return _stdout()
    return open(path, "w", encoding="utf-8")


def run_decompose(cfg: RunConfig, stats_json: str | None = None) -> dict:
    from .pipeline import decompose

    t = time.perf_counter()
    g = load_graph(cfg.input)
    load_time = time.perf_counter() - t
    d = decompose(
        g,
        cfg.r,
        cfg.s,
        cfg.algo,
        delta=cfg.delta if cfg.approx else None,
        threads=cfg.threads,
    )
    if cfg.out_coreness:
        with _open_out(cfg.out_coreness) as fh:
            write_coreness(fh, d.idx, d.coreness, cfg.s, cfg.delta if cfg.approx else None)
    if cfg.out_tree and d.tree is not None:
        with _open_out(cfg.out_tree) as fh:
            export_tree(d.tree, fh)
    if cfg.cut is not None and d.tree is not None:
        nuclei = cut(d.tree, cfg.cut, g if cfg.density else None)
        write_nuclei_report(sys.stdout, nuclei, cfg.density)
    stats = {
        "n": g.n,
        "m": g.m,
        "r": cfg.r,
        "s": cfg.s,
        "algo": cfg.algo,
        "approx_delta": cfg.delta if cfg.approx else None,
        "threads": resolve_threads(cfg.threads),
        "n_r": d.idx.n_r,
        "n_s": d.n_s,
        "k_max": d.k_max,
        "rounds": d.rounds,
        "unites": d.unites,
        "links": d.links,
        "load": load_time,
        **d.times,
        "peak_rss_mb": peak_rss_mb(),
    }
    stats["total"] = sum(stats[k] for k in ("load", "orient", "count", "peel", "tree"))
    phases = " ".join(f"{k}={stats[k]:.3f}s" for k in ("load", "orient", "count", "peel", "tree"))
    print(
        f"stats {phases} rounds={d.rounds} k_max={d.k_max} n_r={d.idx.n_r} n_s={d.n_s} "
        f"unites={d.unites} links={d.links} peak_rss_mb={stats['peak_rss_mb']:.1f}",
        file=sys.stderr,
    )
    if stats_json:
        Path(stats_json).write_text(json.dumps(stats))
    return stats


def cmd_decompose(args: argparse.Namespace) -> int:
    cfg = RunConfig(
        input=args.input,
        r=args.r,
        s=args.s,
        algo=args.algo,
        approx=args.approx,
        delta=args.delta,
        threads=args.threads,
        cut=args.cut,
        density=args.density,
        out_coreness=args.out_coreness,
        out_tree=args.out_tree,
        seed=args.seed,
    )
    cfg.validate()
    with deadline(args.timeout_secs):
        run_decompose(cfg, args.stats_json)
    return EXIT_OK


def cmd_query(args: argparse.Namespace) -> int:
    with open(args.tree, encoding="utf-8") as fh:
        tree = import_tree(fh)
    g: Graph | None = None
    if args.density:
        if not args.input:
            raise UsageError("--density needs --input with the graph")
        g = load_graph(args.input)
    nuclei = cut(tree, args.cut, g) if 1 <= args.cut <= tree.k_max else []
    with _open_out(args.out) as fh:
        write_nuclei_report(fh, nuclei, args.density)
    return EXIT_OK


def _digest(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


def _parse_pairs(text: str) -> list[tuple[int, int]]:
    if text == "all":
        return list(itertools.combinations(range(1, 6), 2))
    pairs = []
    for item in text.split(";"):
        r, s = (int(x) for x in item.split(","))
        pairs.append((r, s))
    return pairs


def cmd_bench(args: argparse.Namespace) -> int:
    pairs = _parse_pairs(args.pairs)
    algos = args.algos.split(",")
    threads = [int(t) for t in args.thread_list.split(",")]
    for a in algos:
        if a not in ALGOS:
            raise UsageError(f"unknown algo {a!r}")
    if not Path(args.input).exists():
        raise FileNotFoundError(args.input)
    fields = [
        "r", "s", "algo", "threads", "status", "total", "load", "orient", "count", "peel", "tree",
        "rounds", "k_max", "unites", "links", "peak_rss_mb", "speedup", "coreness_digest", "matches_1_thread",
    ]
    rows = []
    with tempfile.TemporaryDirectory() as tmp:
        for (r, s), algo in itertools.product(pairs, algos):
            base_total = None
            base_digest = None
            for T in threads:
                cor = os.path.join(tmp, f"core_{r}_{s}_{algo}_{T}.csv")
                st = os.path.join(tmp, f"stats_{r}_{s}_{algo}_{T}.json")
                cmd = [
                    sys.executable, "-m", "nucleus.cli", "decompose", "--input", args.input,
                    "--r", str(r), "--s", str(s), "--algo", algo, "--threads", str(T),
                    "--out-coreness", cor, "--stats-json", st,
                ]
                if args.approx:
                    cmd += ["--approx", "--delta", str(args.delta)]
                row: dict = {"r": r, "s": s, "algo": algo, "threads": resolve_threads(T)}
                try:
                    proc = subprocess.run(cmd, capture_output=True, timeout=args.timeout_secs)
                    status = {EXIT_OK: "ok", EXIT_OOM: "oom", EXIT_TIMEOUT: "timeout"}.get(
                        proc.returncode, f"exit{proc.returncode}"
                    )
                except subprocess.TimeoutExpired:
                    status = "timeout"
                row["status"] = status
                if status == "ok":
                    stats = json.loads(Path(st).read_text())
                    row.update({k: stats[k] for k in fields if k in stats})
                    row["coreness_digest"] = _digest(cor)
                    if base_total is None:
                        base_total, base_digest = stats["total"], row["coreness_digest"]
                    row["speedup"] = f"{base_total / stats['total']:.3f}" if stats["total"] > 0 else ""
                    row["matches_1_thread"] = row["coreness_digest"] == base_digest
                    for k in ("total", "load", "orient", "count", "peel", "tree", "peak_rss_mb"):
                        row[k] = f"{row[k]:.4f}"
                rows.append(row)
                print(f"bench r={r} s={s} algo={algo} threads={row['threads']} {status}", file=sys.stderr)
    with _open_out(args.out) as fh:
        w = csv.DictWriter(fh, fieldnames=fields, restval="", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    from . import generators

    if args.kind == "gnp":
        g = generators.gnp(args.n, args.p, args.seed)
    elif args.kind == "collab":
        g = generators.collaboration_graph(args.seed)
    elif args.kind == "chunglu":
        g = generators.chung_lu(args.n, args.m, args.seed)
    else:
        g, _ = generators.nested_cores_graph()
    with _open_out(args.out) as fh:
        fh.write(f"# n={g.n} m={g.m} kind={args.kind} seed={args.seed}\n")
        buf = io.StringIO()
        for u, v in g.edges().tolist():
            buf.write(f"{u}\t{v}\n")
        fh.write(buf.getvalue())
    return EXIT_OK


def _threads_default() -> int | None:
    env = os.environ.get(THREADS_ENV)
    return int(env) if env and env.strip() else None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nucleus", description="(r, s) nucleus decomposition and hierarchy")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", help="compute coreness and the hierarchy tree")
    d.add_argument("--input", required=True, help="edge list or binary graph cache")
    d.add_argument("--r", type=int, required=True)
    d.add_argument("--s", type=int, required=True)
    d.add_argument("--algo", default="el", help="te, el or bl")
    d.add_argument("--approx", action="store_true", help="approximate coreness")
    d.add_argument("--delta", type=float, default=0.1)
    d.add_argument("--threads", type=int, default=None, help=f"0 = all cores; defaults to ${THREADS_ENV} or 1")
    d.add_argument("--cut", type=int, default=None, help="also print the nuclei report at this level")
    d.add_argument("--density", action="store_true")
    d.add_argument("--out-coreness", default=None)
    d.add_argument("--out-tree", default=None)
    d.add_argument("--stats-json", default=None, help=argparse.SUPPRESS)
    d.add_argument("--timeout-secs", type=float, default=None)
    d.add_argument("--seed", type=int, default=0)
    d.set_defaults(func=cmd_decompose)

    q = sub.add_parser("query", help="cut a stored hierarchy tree at level c")
    q.add_argument("--tree", required=True)
    q.add_argument("--cut", type=int, required=True)
    q.add_argument("--density", action="store_true")
    q.add_argument("--input", default=None, help="graph, needed for --density")
    q.add_argument("--out", default=None)
    q.set_defaults(func=cmd_query)

    b = sub.add_parser("bench", help="timings and counters over an (r, s, algo, threads) matrix")
    b.add_argument("--input", required=True)
    b.add_argument("--pairs", default="2,3", help="'r,s;r,s' or 'all'")
    b.add_argument("--algos", default="te,el,bl")
    b.add_argument("--thread-list", default="1,2,0")
    b.add_argument("--approx", action="store_true")
    b.add_argument("--delta", type=float, default=0.1)
    b.add_argument("--timeout-secs", type=float, default=600.0)
    b.add_argument("--out", default=None)
    b.set_defaults(func=cmd_bench)

    gen = sub.add_parser("generate", help="write a seeded test graph as an edge list")
    gen.add_argument("--kind", choices=["gnp", "collab", "chunglu", "nested"], default="gnp")
    gen.add_argument("--n", type=int, default=40)
    gen.add_argument("--p", type=float, default=0.2)
    gen.add_argument("--m", type=int, default=100_000)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default=None)
    gen.set_defaults(func=cmd_generate)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", None) is None and hasattr(args, "threads"):
        args.threads = _threads_default()
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"nucleus: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, IsADirectoryError, PermissionError, GraphFormatError, TreeError) as exc:
        print(f"nucleus: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"nucleus: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except MemoryError:
        print("nucleus: out of memory", file=sys.stderr)
        return EXIT_OOM
    except Timeout:
        print("nucleus: timed out", file=sys.stderr)
        return EXIT_TIMEOUT


if __name__ == "__main__":
    sys.exit(main())
