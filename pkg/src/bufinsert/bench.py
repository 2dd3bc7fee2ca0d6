"""Scaling benchmarks: median solve time over seeded synthetic nets.

Every instance is solved by each requested kernel and their slacks are
compared, so a bench run is also a differential test. A mismatch writes a
reproducer file and aborts.
"""
from __future__ import annotations

import csv
import io
import json
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from itertools import product
from pathlib import Path
from typing import Optional

from .generate import gen_net
from .solver import KERNELS, MODES, solve

CSV_COLUMNS = ("m", "n", "b", "kernel", "median_seconds", "normalized", "candidates_peak")


class BenchMismatch(RuntimeError):
    def __init__(self, message: str, reproducer: Optional[Path]):
        super().__init__(message)
        self.reproducer = reproducer


@dataclass
class BenchConfig:
    m: list[int] = field(default_factory=lambda: [500])
    n: list[int] = field(default_factory=lambda: [8000])
    b: list[int] = field(default_factory=lambda: [8, 16, 32, 64])
    repetitions: int = 5
    seed: int = 0
    kernels: list[str] = field(default_factory=lambda: list(KERNELS))
    mode: str = "copy"
    output: Optional[str] = None
    workers: int = 1
    sweep: Optional[str] = None  # "b" or "n"; inferred when omitted

    def __post_init__(self):
        for name in ("m", "n", "b"):
            values = getattr(self, name)
            if not values:
                raise ValueError(f"bench config: {name} must not be empty")
            floor = 0 if name == "n" else 1
            if any(int(x) != x or x < floor for x in values):
                raise ValueError(f"bench config: {name} values must be integers >= {floor}")
        if self.repetitions < 1 or self.workers < 1:
            raise ValueError("bench config: repetitions and workers must be >= 1")
        for k in self.kernels:
            if k not in KERNELS:
                raise ValueError(f"bench config: unknown kernel {k!r}")
        if self.mode not in MODES:
            raise ValueError(f"bench config: unknown mode {self.mode!r}")
        if self.sweep is None:
            self.sweep = "n" if len(self.n) > 1 and len(self.b) == 1 else "b"
        if self.sweep not in ("b", "n"):
            raise ValueError("bench config: sweep must be 'b' or 'n'")

    @classmethod
    def from_json(cls, path) -> "BenchConfig":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        known = {f.name for f in fields(cls)}
        extra = set(doc) - known
        if extra:
            raise ValueError(f"bench config: unknown key {sorted(extra)[0]!r}")
        return cls(**doc)


def _run_instance(args):
    m, n, b, seed, kernels, mode, reps = args
    tree, lib = gen_net(m, n, b, seed)
    out = {}
    for kernel in kernels:
        times = []
        result = None
        for _ in range(reps):
            t0 = time.perf_counter()
            result = solve(tree, lib, kernel, mode)
            times.append(time.perf_counter() - t0)
        out[kernel] = (statistics.median(times), result.kernel_stats.peak_list, result.slack)
    return out


def run_bench(cfg: BenchConfig) -> list[dict]:
    """Rows in configuration order: (m, n) outer, b inner, then kernel."""
    points = [(m, n, b) for (m, n), b in product(product(cfg.m, cfg.n), cfg.b)]
    tasks = [(m, n, b, cfg.seed, tuple(cfg.kernels), cfg.mode, cfg.repetitions) for m, n, b in points]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(_run_instance, tasks))
    else:
        results = [_run_instance(t) for t in tasks]

    rows = []
    for (m, n, b), res in zip(points, results):
        slacks = {k: v[2] for k, v in res.items()}
        if len(set(slacks.values())) > 1:
            repro = Path(cfg.output or "bench").with_suffix(".mismatch.json")
            doc = {"seed": cfg.seed, "m": m, "n": n, "b": b, "mode": cfg.mode, "slacks": slacks}
            repro.write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
            raise BenchMismatch(f"kernel slacks differ at m={m} n={n} b={b}: {slacks}", repro)
        for kernel in cfg.kernels:
            median, peak, _ = res[kernel]
            rows.append({"m": m, "n": n, "b": b, "kernel": kernel, "median_seconds": median,
                         "candidates_peak": peak})

    axis = cfg.sweep
    fixed = ("m", "n", "kernel") if axis == "b" else ("m", "b", "kernel")
    base = {}
    for row in rows:
        key = tuple(row[f] for f in fixed)
        if key not in base or row[axis] < base[key][axis]:
            base[key] = row
    for row in rows:
        ref = base[tuple(row[f] for f in fixed)]["median_seconds"]
        row["normalized"] = row["median_seconds"] / ref if ref > 0 else float("nan")
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([r["m"], r["n"], r["b"], r["kernel"], f"{r['median_seconds']:.6e}",
                    f"{r['normalized']:.6f}", r["candidates_peak"]])
    return buf.getvalue()


def speedup_by_b(rows: list[dict], slow: str = "baseline", fast: str = "fast") -> dict[int, float]:
    """Median-time ratio slow/fast per library size (first (m, n) point)."""
    m0, n0 = rows[0]["m"], rows[0]["n"]
    t = {(r["b"], r["kernel"]): r["median_seconds"] for r in rows if r["m"] == m0 and r["n"] == n0}
    return {b: t[b, slow] / t[b, fast] for b, k in t if k == fast and (b, slow) in t}
