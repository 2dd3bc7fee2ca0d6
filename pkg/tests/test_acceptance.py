"""Acceptance checks at their stated scales and tolerances.

Each test prints one ``PASS`` or ``FAIL`` line. The heavy runs are shared
through module fixtures, so criteria 4-6 and 8 reuse the instances of
criteria 1-3. Expect several minutes on one core.
"""
import random
import time

import pytest

from bufinsert.bench import BenchConfig, run_bench, speedup_by_b
from bufinsert.candidates import CandidateList, ScanStats, convex_hull, convex_prune
from bufinsert.net import Assignment
from bufinsert.oracle import brute_force, evaluate
from bufinsert.solver import KernelStats, solve
from helpers import close, medium_instance, random_staircase, small_instance

pytestmark = pytest.mark.slow

N_SMALL = 1000
N_MEDIUM = 10_000
N_LISTS = 100_000


def report(capsys, number, title, ok, detail):
    with capsys.disabled():
        print(f"\n[{number}] {'PASS' if ok else 'FAIL'}  {title}: {detail}")


class Tally:
    """Kernel counters summed over many debug solves."""

    def __init__(self):
        self.stats = KernelStats()
        self.solves = 0
        self.aborted = []  # (seed, message) for debug assertions that fired

    def solve(self, seed, tree, lib, kernel, mode):
        self.solves += 1
        try:
            res = solve(tree, lib, kernel, mode, debug=True)
        except AssertionError as exc:
            self.aborted.append((seed, str(exc)))
            return None
        s, k = self.stats, res.kernel_stats
        s.scan.merge(k.scan)
        s.pointer_violations += k.pointer_violations
        s.local_max_violations += k.local_max_violations
        s.size_bound_violations += k.size_bound_violations
        s.peak_list = max(s.peak_list, k.peak_list)
        return res

    def aborted_with(self, word):
        return [a for a in self.aborted if word in a[1]]


@pytest.fixture(scope="module")
def small_runs():
    tally = Tally()
    mismatches, exact = [], 0
    t0 = time.perf_counter()
    for seed in range(N_SMALL):
        tree, lib = small_instance(seed)
        best, _ = brute_force(tree, lib)
        res = tally.solve(seed, tree, lib, "fast", "copy")
        if res is None or not close(res.slack, best):
            mismatches.append(seed)
            continue
        exact += res.slack == best
        if not close(evaluate(tree, lib, res.assignment).slack, best):
            mismatches.append(seed)
    return dict(tally=tally, mismatches=mismatches, exact=exact, seconds=time.perf_counter() - t0)


@pytest.fixture(scope="module")
def medium_runs():
    tally = Tally()
    kernel_mismatch, reeval_mismatch, mode_mismatch = [], [], []
    t0 = time.perf_counter()
    for seed in range(N_MEDIUM):
        tree, lib = medium_instance(seed)
        fast = tally.solve(seed, tree, lib, "fast", "copy")
        base = tally.solve(seed, tree, lib, "baseline", "copy")
        destr = tally.solve(seed, tree, lib, "fast", "destructive")
        if fast is None or base is None or fast.slack != base.slack:
            kernel_mismatch.append(seed)
            continue
        for res in (fast, base):
            if not close(evaluate(tree, lib, res.assignment).slack, res.slack):
                reeval_mismatch.append(seed)
                break
        if destr is None or destr.slack != fast.slack:
            gap = None if destr is None else fast.slack - destr.slack
            mode_mismatch.append((seed, gap))
    return dict(tally=tally, kernel=kernel_mismatch, reeval=reeval_mismatch, mode=mode_mismatch,
                seconds=time.perf_counter() - t0)


@pytest.fixture(scope="module")
def list_runs():
    rng = random.Random("hull-acceptance")
    linked, stack = ScanStats(), ScanStats()
    failures = 0
    for _ in range(N_LISTS):
        pts = random_staircase(rng, rng.randint(1, 60))
        r = rng.uniform(180.0, 7000.0)
        full = max(q - r * c for q, c in pts)
        pruned = convex_prune(CandidateList.from_pairs(pts), linked)
        hull = convex_hull(CandidateList.from_pairs(pts), stack)
        if max(c.Q - r * c.C for c in pruned) != full or max(c.Q - r * c.C for c in hull) != full:
            failures += 1
    return dict(failures=failures, linked=linked, stack=stack)


def test_1_optimality_against_exhaustive_search(small_runs, capsys):
    r = small_runs
    ok = not r["mismatches"] and r["seconds"] < 60.0
    detail = (f"{N_SMALL} instances, {len(r['mismatches'])} mismatches, {r['exact']} bitwise equal, "
              f"{r['seconds']:.1f} s (limit 60 s)")
    report(capsys, 1, "fast kernel equals exhaustive optimum", ok, detail)
    assert ok, detail


def test_2_kernel_equivalence(medium_runs, capsys):
    r = medium_runs
    ok = not r["kernel"] and not r["reeval"]
    detail = (f"{N_MEDIUM} instances, {len(r['kernel'])} slack mismatches, "
              f"{len(r['reeval'])} re-evaluation mismatches, {r['seconds']:.0f} s")
    report(capsys, 2, "fast == baseline, assignments re-evaluate", ok, detail)
    assert ok, detail


def test_3_convex_pruning_keeps_linear_maximum(list_runs, capsys):
    ok = list_runs["failures"] == 0
    detail = f"{N_LISTS} lists, r in [180, 7000] ohm, {list_runs['failures']} failures"
    report(capsys, 3, "hull attains max of Q - r*C", ok, detail)
    assert ok, detail


def test_4_scan_move_bound(small_runs, medium_runs, list_runs, capsys):
    scans = [small_runs["tally"].stats.scan, medium_runs["tally"].stats.scan, list_runs["linked"], list_runs["stack"]]
    calls = sum(s.calls for s in scans)
    violations = sum(s.bound_violations for s in scans)
    aborted = len(small_runs["tally"].aborted_with("moves") + medium_runs["tally"].aborted_with("moves"))
    ok = violations == 0 and aborted == 0 and calls > 0
    detail = f"{calls} scans, {sum(s.moves for s in scans)} moves, {violations + aborted} over 2k"
    report(capsys, 4, "scan moves <= 2k", ok, detail)
    assert ok, detail


def test_5_candidate_list_bound(small_runs, medium_runs, capsys):
    tallies = [small_runs["tally"], medium_runs["tally"]]
    violations = sum(t.stats.size_bound_violations + len(t.aborted_with("candidate bound")) for t in tallies)
    ok = violations == 0
    detail = (f"{sum(t.solves for t in tallies)} debug solves, peak list {max(t.stats.peak_list for t in tallies)}, "
              f"{violations} lists over b*n + m")
    report(capsys, 5, "list length <= b*n + m", ok, detail)
    assert ok, detail


def test_6_monotone_pointer(small_runs, medium_runs, capsys):
    tallies = [small_runs["tally"], medium_runs["tally"]]
    violations = sum(t.stats.pointer_violations + t.stats.local_max_violations
                     + len(t.aborted_with("pointer")) for t in tallies)
    ok = violations == 0
    detail = f"{sum(t.solves for t in tallies)} debug solves, {violations} pointer violations"
    report(capsys, 6, "best-candidate pointer never moves back", ok, detail)
    assert ok, detail


def test_7_scaling_trend(capsys):
    cfg = BenchConfig(m=[500], n=[8000], b=[8, 16, 32, 64], repetitions=5, seed=0)
    rows = run_bench(cfg)
    ratio = speedup_by_b(rows)
    gain = ratio[64] / ratio[8]
    ok = gain >= 2.0
    detail = ", ".join(f"b={b}: {v:.2f}x" for b, v in sorted(ratio.items())) + f"; growth {gain:.2f} (need >= 2)"
    report(capsys, 7, "baseline/fast ratio grows with b", ok, detail)
    assert ok, detail


def test_8_destructive_equals_copy(medium_runs, capsys):
    bad = medium_runs["mode"]
    ok = not bad
    worst = max((g for _, g in bad if g is not None), default=0.0)
    detail = f"{N_MEDIUM} instances, {len(bad)} differ (largest slack loss {worst:.3e} s)"
    if bad:
        detail += f", first seeds {[s for s, _ in bad[:5]]}"
    report(capsys, 8, "destructive pruning == copy pruning", ok, detail)
    assert ok, detail
