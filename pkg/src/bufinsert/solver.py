"""Bottom-up buffer insertion over a routing tree.

Each vertex gets a nonredundant candidate list. Lists are moved up wires,
merged at branch points, and extended with buffered candidates at buffer
positions. Two buffer kernels are provided:

``fast``
    Convex-prune the list, then find every buffer type's best candidate with
    one pointer that only moves forward while buffer types are visited in
    non-increasing driving resistance. O(k + b) per position.
``baseline``
    Scan the whole list once per buffer type and insert each new candidate
    separately. O(b k) per position.

Traces are immutable tuples shared between candidates:
``("s", sink)``, ``("b", vertex, buffer_id, parent)``, ``("m", left, right)``.
Wires do not create trace nodes; a candidate moved across a wire keeps its
trace.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .candidates import Candidate, CandidateList, ScanStats, convex_hull, convex_prune, insert_pruned, merge_sorted
from .net import Assignment, BufferLibrary, RoutingTree, Sink

KERNELS = ("fast", "baseline")
MODES = ("destructive", "copy")


@dataclass
class KernelStats:
    buffer_calls: int = 0
    betas: int = 0
    peak_list: int = 0
    scan: ScanStats = field(default_factory=ScanStats)
    pointer_violations: int = 0
    local_max_violations: int = 0
    size_bound_violations: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SolveResult:
    slack: float
    assignment: Assignment
    root_C: float
    candidate_counts: dict[str, int]
    kernel_stats: KernelStats


def leaf_candidates(sink: Sink, sink_id: str = "") -> CandidateList:
    lst = CandidateList()
    lst.append(Candidate(sink.RAT, sink.C, ("s", sink_id)))
    return lst


def add_wire(lst: CandidateList, R: float, C: float) -> CandidateList:
    """Move a list across a lumped RC wire, in place.

    Q drops by R * (C/2 + downstream C). The penalty grows with C, so later
    candidates can become dominated; they are removed in the same pass.
    """
    if R == 0.0 and C == 0.0:
        return lst
    half = C / 2
    head = lst.head
    last = head
    p = head.next
    while p is not head:
        nxt = p.next
        p.Q = p.Q - R * (half + p.C)
        p.C = p.C + C
        if last is not head and p.Q <= last.Q:
            lst.remove(p)
        else:
            if last is not head and p.C <= last.C:
                lst.remove(last)
            last = p
        p = nxt
    return lst


def merge_branches(left: CandidateList, right: CandidateList) -> CandidateList:
    """Combine the lists of two sibling subtrees.

    Walks both lists once, always advancing the side with the smaller Q.
    """
    out = CandidateList()
    lh, rh = left.head, right.head
    a = lh.next
    b = rh.next
    while a is not lh and b is not rh:
        aq, bq = a.Q, b.Q
        out.push(Candidate(aq if aq < bq else bq, a.C + b.C, ("m", a.trace, b.trace)))
        if aq < bq:
            a = a.next
        elif bq < aq:
            b = b.next
        else:
            a = a.next
            b = b.next
    return out


def _allowed_indices(lib: BufferLibrary, allowed) -> list[int]:
    """Library indices allowed at a vertex, in non-increasing R order."""
    idx = lib.index
    wanted = {idx[b] for b in allowed}
    return [i for i in lib.order_by_R if i in wanted]


def add_buffer_fast(
    lst: CandidateList,
    lib: BufferLibrary,
    allowed,
    v: str,
    mode: str = "copy",
    stats: Optional[KernelStats] = None,
    debug: bool = False,
) -> CandidateList:
    """Add one buffered candidate per allowed buffer type at position ``v``.

    In ``destructive`` mode the convex pruning deletes members of ``lst``;
    in ``copy`` mode the hull is computed on the side and ``lst`` keeps every
    nonredundant member. Only ``copy`` is exact on multi-sink nets: after a
    branch merge the upstream slack is a minimum over branches, and a point
    below the hull can then be the one that wins.
    """
    order = _allowed_indices(lib, allowed)
    if not lst:
        return lst
    stats = stats if stats is not None else KernelStats()
    stats.buffer_calls += 1
    if debug:
        snap_Q = np.array([c.Q for c in lst])
        snap_C = np.array([c.C for c in lst])
    if mode == "copy":
        hull = convex_hull(lst, stats.scan)
    else:
        hull = list(convex_prune(lst, stats.scan))
    if not order:
        return lst

    buffers = lib.buffers
    last = len(hull) - 1
    pos = 0
    a1 = hull[0]
    found = [None] * len(buffers)
    last_pos = -1
    last_C = None
    for i in order:
        buf = buffers[i]
        R, K = buf.R, buf.K
        p1 = a1.Q - R * a1.C - K
        while pos < last:
            a2 = hull[pos + 1]
            p2 = a2.Q - R * a2.C - K
            if p1 < p2:
                a1 = a2
                p1 = p2
                pos += 1
            else:
                break
        found[i] = Candidate(p1, buf.C, ("b", v, buf.id, a1.trace))
        if debug:
            if pos < last_pos or (last_C is not None and a1.C < last_C):
                stats.pointer_violations += 1
            for nb in hull[max(pos - 1, 0) : pos + 2]:
                if nb.Q - R * nb.C - K > p1:
                    stats.local_max_violations += 1
            if float(np.max(snap_Q - R * snap_C - K)) != p1:
                stats.local_max_violations += 1
            last_pos, last_C = pos, a1.C
    stats.betas += len(order)
    if debug:
        assert stats.pointer_violations == 0, "best-candidate pointer moved backwards"
        assert stats.local_max_violations == 0, "pointer walk missed the global maximum"
    betas = [found[i] for i in lib.order_by_C if found[i] is not None]
    return merge_sorted(lst, betas)


def add_buffer_baseline(
    lst: CandidateList,
    lib: BufferLibrary,
    allowed,
    v: str,
    stats: Optional[KernelStats] = None,
) -> CandidateList:
    """Reference buffer step: full scan per buffer type, one insertion per result."""
    order = _allowed_indices(lib, allowed)
    if not lst or not order:
        return lst
    if stats is not None:
        stats.buffer_calls += 1
        stats.betas += len(order)
    head = lst.head
    betas = []
    for i in order:
        buf = lib.buffers[i]
        R, K = buf.R, buf.K
        best = head.next
        best_p = best.Q - R * best.C - K
        a = best.next
        while a is not head:
            p = a.Q - R * a.C - K
            if p > best_p:
                best, best_p = a, p
            a = a.next
        betas.append(Candidate(best_p, buf.C, ("b", v, buf.id, best.trace)))
    for beta in betas:
        insert_pruned(lst, beta)
    return lst


def _placements(trace) -> dict[str, str]:
    out = {}
    stack = [trace]
    while stack:
        t = stack.pop()
        kind = t[0]
        if kind == "b":
            out[t[1]] = t[2]
            stack.append(t[3])
        elif kind == "m":
            stack.append(t[1])
            stack.append(t[2])
    return out


def solve(
    tree: RoutingTree,
    lib: BufferLibrary,
    kernel: str = "fast",
    mode: str = "copy",
    debug: bool = False,
) -> SolveResult:
    """Maximize source slack over all buffer assignments.

    With ``debug`` the kernel-level invariants are asserted as they are
    visited: list ordering, the per-subtree list-size bound, and the
    monotone best-candidate pointer of the fast kernel.
    """
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    tree.check_library(lib)

    stats = KernelStats()
    b = len(lib)
    lists: dict[str, CandidateList] = {}
    below: dict[str, tuple[int, int]] = {}  # vertex -> (positions, sinks) in subtree
    counts: dict[str, int] = {}
    children = tree.children
    sinks = tree.sinks
    internal = tree.internal
    peak = 0

    for v in tree.postorder:
        if v in sinks:
            lst = leaf_candidates(sinks[v], v)
            npos, nsink = 0, 1
        else:
            lst = None
            npos = nsink = 0
            for e in children[v]:
                child = add_wire(lists.pop(e.dst), e.R, e.C)
                cp, cs = below.pop(e.dst)
                npos += cp
                nsink += cs
                if debug:
                    child.check()
                    if len(child) > b * cp + cs:
                        stats.size_bound_violations += 1
                lst = child if lst is None else merge_branches(lst, child)
            allowed = internal.get(v)
            if allowed:
                npos += 1
                if kernel == "fast":
                    lst = add_buffer_fast(lst, lib, allowed, v, mode, stats, debug)
                else:
                    lst = add_buffer_baseline(lst, lib, allowed, v, stats)
        if debug:
            lst.check()
            if len(lst) > b * npos + nsink:
                stats.size_bound_violations += 1
            assert stats.size_bound_violations == 0, f"list at {v!r} exceeds the candidate bound"
        counts[v] = len(lst)
        if len(lst) > peak:
            peak = len(lst)
        lists[v] = lst
        below[v] = (npos, nsink)

    root = lists[tree.source]
    best = None
    best_score = 0.0
    drv = tree.driver
    for a in root:
        score = a.Q if drv is None else a.Q - drv.R * a.C - drv.K
        if best is None or score > best_score:
            best, best_score = a, score
    stats.peak_list = peak
    return SolveResult(best_score, Assignment(_placements(best.trace)), best.C, counts, stats)
