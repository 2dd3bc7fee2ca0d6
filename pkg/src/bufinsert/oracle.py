"""Ground truth for small nets: direct Elmore evaluation and exhaustive search.

Nothing here shares code with the solver. The delay arithmetic is written
out again on purpose so the two can be checked against each other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .net import Assignment, BufferLibrary, RoutingTree

DEFAULT_CAP = 2**22


class BruteForceCapExceeded(RuntimeError):
    def __init__(self, count: int, cap: int):
        super().__init__(f"exhaustive search needs {count} assignments, cap is {cap}")
        self.count = count
        self.cap = cap


@dataclass
class EvalReport:
    slack: float
    per_sink: dict[str, tuple[float, float]]  # sink -> (delay, slack)
    downstream_cap: dict[str, float]  # vertex -> capacitance seen from its parent edge


def evaluate(tree: RoutingTree, lib: BufferLibrary, a: Assignment) -> EvalReport:
    """Slack of a fixed buffer assignment under Elmore wire and linear buffer delay."""
    a.check(tree)
    placed = {v: lib[b] for v, b in a.placements.items()}
    children = tree.children

    # bottom-up: load driven at each vertex, and what its parent edge sees
    load: dict[str, float] = {}
    seen: dict[str, float] = {}
    for v in tree.postorder:
        if v in tree.sinks:
            total = tree.sinks[v].C
        else:
            total = 0.0
            for e in children[v]:
                total = total + (e.C + seen[e.dst])
        load[v] = total
        seen[v] = placed[v].C if v in placed else total

    # top-down: arrival time at each vertex
    drv = tree.driver
    arrival = {tree.source: 0.0 if drv is None else drv.R * load[tree.source] + drv.K}
    stack = [tree.source]
    while stack:
        u = stack.pop()
        gate = 0.0
        if u in placed:
            gate = placed[u].R * load[u] + placed[u].K
        for e in children.get(u, ()):
            arrival[e.dst] = arrival[u] + gate + e.R * (e.C / 2 + seen[e.dst])
            stack.append(e.dst)

    per_sink = {}
    worst = math.inf
    for s in sorted(tree.sinks):
        d = arrival[s]
        q = tree.sinks[s].RAT - d
        per_sink[s] = (d, q)
        worst = min(worst, q)
    return EvalReport(worst, per_sink, seen)


def count_assignments(tree: RoutingTree) -> int:
    return math.prod(len(tree.internal[v]) + 1 for v in tree.positions)


def _batch_slack(tree, lib, positions, digits):
    """Slack for a batch of assignments given as per-position choice arrays.

    Mirrors ``evaluate`` operation for operation; choice 0 means no buffer,
    choice j means the j-th allowed buffer at that position.
    """
    n = len(digits[0]) if digits else 1
    children = tree.children
    bufR, bufC, bufK, has = {}, {}, {}, {}
    for v, d in zip(positions, digits):
        allowed = [lib[b] for b in tree.internal[v]]
        bufR[v] = np.array([0.0] + [b.R for b in allowed])[d]
        bufC[v] = np.array([0.0] + [b.C for b in allowed])[d]
        bufK[v] = np.array([0.0] + [b.K for b in allowed])[d]
        has[v] = d > 0

    load, seen = {}, {}
    for v in tree.postorder:
        if v in tree.sinks:
            total = np.full(n, tree.sinks[v].C)
        else:
            total = np.zeros(n)
            for e in children[v]:
                total = total + (e.C + seen[e.dst])
        load[v] = total
        seen[v] = np.where(has[v], bufC[v], total) if v in has else total

    drv = tree.driver
    arrival = {tree.source: np.zeros(n) if drv is None else drv.R * load[tree.source] + drv.K}
    stack = [tree.source]
    while stack:
        u = stack.pop()
        gate = np.where(has[u], bufR[u] * load[u] + bufK[u], 0.0) if u in has else 0.0
        for e in children.get(u, ()):
            arrival[e.dst] = arrival[u] + gate + e.R * (e.C / 2 + seen[e.dst])
            stack.append(e.dst)

    worst = np.full(n, np.inf)
    for s in sorted(tree.sinks):
        worst = np.minimum(worst, tree.sinks[s].RAT - arrival[s])
    return worst


def brute_force(
    tree: RoutingTree, lib: BufferLibrary, cap: int = DEFAULT_CAP, chunk: int = 1 << 15
) -> tuple[float, Assignment]:
    """Best slack over every legal assignment, with a witness.

    Assignments are enumerated in mixed-radix order over positions sorted by
    id (first position most significant, "no buffer" before the allowed
    buffers in their listed order); the first maximum wins.
    """
    tree.check_library(lib)
    positions = tree.positions
    radices = [len(tree.internal[v]) + 1 for v in positions]
    total = math.prod(radices)
    if total > cap:
        raise BruteForceCapExceeded(total, cap)

    best_slack = -math.inf
    best_index = 0
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk))
        digits = np.unravel_index(idx, radices) if radices else ()
        slack = _batch_slack(tree, lib, positions, list(digits))
        j = int(np.argmax(slack))
        if slack[j] > best_slack:
            best_slack = float(slack[j])
            best_index = start + j

    choice = np.unravel_index(best_index, radices) if radices else ()
    placements = {
        v: tree.internal[v][int(d) - 1] for v, d in zip(positions, choice) if int(d) > 0
    }
    return best_slack, Assignment(placements)
