"""Command line: ``bufinsert {solve,verify,gen,bench}``.

Exit codes: 0 success, 1 invalid input (or kernel disagreement in bench),
2 I/O failure, 3 exhaustive search over its cap.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

from .bench import BenchConfig, BenchMismatch, rows_to_csv, run_bench
from .generate import gen_net
from .net import NetError, load_assignment, load_library, load_net, save_library, save_net
from .oracle import DEFAULT_CAP, BruteForceCapExceeded, brute_force, count_assignments, evaluate
from .solver import KERNELS, MODES, solve

EXIT_INVALID = 1
EXIT_IO = 2
EXIT_CAP = 3


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load(args):
    lib = load_library(args.lib)
    return load_net(args.net, lib), lib


def cmd_solve(args) -> int:
    tree, lib = _load(args)
    t0 = time.perf_counter()
    if args.kernel == "brute":
        slack, assignment = brute_force(tree, lib, cap=args.cap)
        counts, stats = {}, {"assignments": count_assignments(tree)}
    else:
        res = solve(tree, lib, args.kernel, args.mode, debug=args.debug)
        slack, assignment = res.slack, res.assignment
        counts, stats = res.candidate_counts, res.kernel_stats.to_dict()
    wall = time.perf_counter() - t0
    report = {
        "kernel": args.kernel,
        "mode": args.mode if args.kernel != "brute" else None,
        "slack": slack,
        "assignment": assignment.to_json(),
        "candidate_counts": counts,
        "kernel_stats": stats,
        "wall_seconds": wall,
    }
    if args.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["kernel", "mode", "slack", "buffers", "peak_candidates", "wall_seconds"])
        w.writerow([args.kernel, report["mode"] or "", f"{slack:.17e}", len(assignment.placements),
                    max(counts.values(), default=0), f"{wall:.6e}"])
        _emit(buf.getvalue(), args.out)
    else:
        _emit(json.dumps(report, indent=1) + "\n", args.out)
    return 0


def cmd_verify(args) -> int:
    tree, lib = _load(args)
    report = evaluate(tree, lib, load_assignment(args.assignment))
    doc = {
        "slack": report.slack,
        "per_sink": {s: {"delay": d, "slack": q} for s, (d, q) in report.per_sink.items()},
    }
    _emit(json.dumps(doc, indent=1) + "\n", args.out)
    return 0


def cmd_gen(args) -> int:
    tree, lib = gen_net(args.m, args.n, args.b, args.seed, args.allowed_fraction)
    save_net(tree, args.net_out)
    save_library(lib, args.lib_out)
    return 0


def cmd_bench(args) -> int:
    if args.config:
        cfg = BenchConfig.from_json(args.config)
    else:
        cfg = BenchConfig(m=args.m, n=args.n, b=args.b, repetitions=args.reps, seed=args.seed,
                          kernels=args.kernels, mode=args.mode, output=args.out,
                          workers=args.workers, sweep=args.sweep)
    rows = run_bench(cfg)
    _emit(rows_to_csv(rows), cfg.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bufinsert", description="Optimal buffer insertion on RC trees.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="maximize source slack for one net")
    p.add_argument("--net", required=True)
    p.add_argument("--lib", required=True)
    p.add_argument("--kernel", choices=KERNELS + ("brute",), default="fast")
    p.add_argument("--mode", choices=MODES, default="copy")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON report (default)")
    fmt.add_argument("--csv", action="store_true", help="one-row CSV summary")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="max assignments for --kernel brute")
    p.add_argument("--debug", action="store_true", help="assert kernel invariants while solving")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="evaluate an assignment file against a net")
    p.add_argument("--net", required=True)
    p.add_argument("--lib", required=True)
    p.add_argument("--assignment", required=True, help="JSON map vertex -> buffer id, or a solve report")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="write a seeded synthetic net and library")
    p.add_argument("--m", type=int, required=True, help="sinks")
    p.add_argument("--n", type=int, required=True, help="buffer positions")
    p.add_argument("--b", type=int, default=8, help="library size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--allowed-fraction", type=float, default=1.0)
    p.add_argument("--net-out", required=True)
    p.add_argument("--lib-out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="median solve times over a sweep (CSV)")
    p.add_argument("--config", help="JSON file with BenchConfig fields; overrides the flags")
    p.add_argument("--m", type=int, nargs="+", default=[500])
    p.add_argument("--n", type=int, nargs="+", default=[8000])
    p.add_argument("--b", type=int, nargs="+", default=[8, 16, 32, 64])
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kernels", nargs="+", choices=KERNELS, default=list(KERNELS))
    p.add_argument("--mode", choices=MODES, default="copy")
    p.add_argument("--sweep", choices=("b", "n"))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BruteForceCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except BenchMismatch as exc:
        print(f"error: {exc} (reproducer: {exc.reproducer})", file=sys.stderr)
        return EXIT_INVALID
    except (NetError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
