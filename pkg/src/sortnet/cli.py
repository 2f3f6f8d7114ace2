"""Command-line front end.

    sortnet generate -n 7 -k 10 --variant matching --out levels/ --stats stats.jsonl
    sortnet search -n 6
    sortnet check 0:1,1:2,0:3 0:1,0:2,1:3 --compare
    sortnet verify 0:1,2:3,1:3,0:2,1:2
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from sortnet import persist
from sortnet.generate import (
    MAX_SEARCH_CHANNELS,
    FilterSet,
    SearchFailed,
    generate_up_to,
    search_optimal_size,
)
from sortnet.network import (
    ComparatorNetwork,
    is_sorting_network,
    outputs,
    parse_network,
    render_network,
    sorts_all_inputs,
)
from sortnet.subsumption import subsumes_by_matchings, subsumes_by_permutations

log = logging.getLogger("sortnet")


@dataclass
class RunConfig:
    command: str
    n: Optional[int] = None
    k_max: Optional[int] = None
    variant: str = "matching"
    workers: int = 1
    output_path: Optional[str] = None
    resume_path: Optional[str] = None
    stats_path: Optional[str] = None
    format: str = "text"

    def validate(self) -> None:
        if self.workers < 1:
            raise ValueError("--workers must be at least 1")
        if self.command in ("generate", "search"):
            if self.n is None or not 2 <= self.n <= MAX_SEARCH_CHANNELS:
                raise ValueError(f"-n must lie in [2, {MAX_SEARCH_CHANNELS}]")
        if self.command == "generate" and (self.k_max is None or self.k_max < 1):
            raise ValueError("-k must be at least 1")


def _fmt_perm(pi) -> str:
    return "(" + ",".join(map(str, pi)) + ")"


def _stats_line(rec: dict) -> str:
    pre = rec["precheckRejects"]
    return (
        f"k={rec['level']:<3d} size={rec['size']:<8d} total={rec['totalChecks']:<12d} "
        f"sub={rec['subsumptionsFound']:<9d} perm={rec['permutationsChecked']:<10d} "
        f"ST1/2/3={pre['ST1']}/{pre['ST2']}/{pre['ST3']} time={rec['elapsedMillis'] / 1000:.2f}s"
    )


def cmd_generate(cfg: RunConfig) -> int:
    start: Optional[FilterSet] = None
    if cfg.resume_path:
        start = persist.read_filter_set(cfg.resume_path)
        if start.n != cfg.n:
            raise ValueError(f"resume file has n={start.n}, expected n={cfg.n}")
        log.info("resuming from level k=%d (%d networks)", start.k, len(start))
    out_dir = Path(cfg.output_path) if cfg.output_path else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    if cfg.stats_path:
        Path(cfg.stats_path).write_text("")
    last = start
    for level, stats in generate_up_to(cfg.n, cfg.k_max, cfg.variant, cfg.workers, start=start):
        rec = {"n": cfg.n, "variant": cfg.variant, **stats.record()}
        print(_stats_line(rec), file=sys.stderr, flush=True)
        if out_dir is not None:
            persist.write_filter_set(level, out_dir / persist.level_filename(cfg.n, level.k, cfg.format), cfg.format)
        if cfg.stats_path:
            persist.append_stats(rec, cfg.stats_path)
        last = level
    if out_dir is None and last is not None:
        sys.stdout.write(persist.dumps_text(last))
    return 0


def cmd_search(cfg: RunConfig, k_ceiling: int) -> int:
    records = []

    def on_level(level, stats):
        rec = {"n": cfg.n, "variant": cfg.variant, **stats.record()}
        records.append(rec)
        print(_stats_line(rec), file=sys.stderr, flush=True)

    t0 = time.perf_counter()
    try:
        s, witness = search_optimal_size(cfg.n, cfg.variant, cfg.workers, k_ceiling, on_level)
    except SearchFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    finally:
        if cfg.stats_path:
            persist.write_stats(records, cfg.stats_path)
    verified = sorts_all_inputs(witness)
    print(f"s={s}")
    print(f"witness={render_network(witness)}")
    print(f"verified={'yes' if verified else 'no'} inputs={1 << cfg.n} time={time.perf_counter() - t0:.2f}s")
    return 0 if verified else 4


def _parse_pair(a: str, b: str, n: Optional[int]) -> tuple[ComparatorNetwork, ComparatorNetwork]:
    if n is None:
        na = parse_network(a).channels if a.strip() else 0
        nb = parse_network(b).channels if b.strip() else 0
        n = max(na, nb)
    return parse_network(a, n), parse_network(b, n)


def cmd_check(a: str, b: str, variant: str, compare: bool, n: Optional[int] = None) -> int:
    net_a, net_b = _parse_pair(a, b, n)
    if net_a.channels != net_b.channels:
        raise ValueError("networks have different channel counts")
    out_a, out_b = outputs(net_a), outputs(net_b)
    fn = subsumes_by_matchings if variant == "matching" else subsumes_by_permutations
    res = fn(out_a, out_b)
    print(f"n={net_a.channels} |outputs(A)|={out_a.size} |outputs(B)|={out_b.size}")
    if res.subsumes:
        print(f"subsumes=yes witness={_fmt_perm(res.witness)}")
    else:
        print(f"subsumes=no rejected_by={res.rejected_by.value}")
    if compare:
        for name, f in (("permutation", subsumes_by_permutations), ("matching", subsumes_by_matchings)):
            r = f(out_a, out_b)
            print(
                f"{name}: subsumes={'yes' if r.subsumes else 'no'} "
                f"verified={r.candidates_checked} enumerated={r.permutations_tried}"
            )
    return 0


def cmd_verify(text: str, n: Optional[int] = None) -> int:
    net = parse_network(text, n)
    out = outputs(net)
    sorting = is_sorting_network(out)
    print(f"n={net.channels} k={net.size}")
    print(f"sorting={'yes' if sorting else 'no'}")
    print(f"output_size={out.size}")
    print("cluster_sizes=" + ",".join(map(str, out.cluster_sizes())))
    if sorting != sorts_all_inputs(net):
        raise AssertionError("output-set test disagrees with the zero-one check")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sortnet", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_k: bool) -> None:
        p.add_argument("-n", type=int, required=True, help="number of channels")
        if need_k:
            p.add_argument("-k", type=int, required=True, help="last level to build")
        p.add_argument("--variant", choices=("permutation", "matching"), default="matching")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--stats", dest="stats_path")

    g = sub.add_parser("generate", help="build complete sets of filters level by level")
    common(g, need_k=True)
    g.add_argument("--out", dest="output_path", help="directory receiving one file per level")
    g.add_argument("--resume", dest="resume_path", help="filter-set file to continue from")
    g.add_argument("--format", choices=("text", "binary"), default="text")

    s = sub.add_parser("search", help="find the optimal size s_n and a witness")
    common(s, need_k=False)
    s.add_argument("--k-ceiling", type=int, default=64)

    c = sub.add_parser("check", help="does network A subsume network B?")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("-n", type=int, help="channel count (default: inferred)")
    c.add_argument("--variant", choices=("permutation", "matching"), default="matching")
    c.add_argument("--compare", action="store_true", help="report counts for both variants")

    v = sub.add_parser("verify", help="is the network a sorting network?")
    v.add_argument("net")
    v.add_argument("-n", type=int, help="channel count (default: inferred)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "check":
            return cmd_check(args.a, args.b, args.variant, args.compare, args.n)
        if args.command == "verify":
            return cmd_verify(args.net, args.n)
        cfg = RunConfig(
            command=args.command,
            n=args.n,
            k_max=getattr(args, "k", None),
            variant=args.variant,
            workers=args.workers,
            output_path=getattr(args, "output_path", None),
            resume_path=getattr(args, "resume_path", None),
            stats_path=args.stats_path,
            format=getattr(args, "format", "text"),
        )
        cfg.validate()
        if args.command == "generate":
            return cmd_generate(cfg)
        return cmd_search(cfg, args.k_ceiling)
    except persist.CorruptFileError as exc:
        print(f"error: corrupt filter-set file: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
