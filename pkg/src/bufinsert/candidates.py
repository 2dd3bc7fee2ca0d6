"""Sorted (Q, C) candidate lists and the kernels that prune and merge them.

A candidate summarizes a buffering choice for a subtree by its slack ``Q``
and the capacitance ``C`` it presents upstream. A nonredundant list keeps
candidates strictly increasing in both Q and C, so no member dominates
another.

The list is an intrusive, circular, doubly linked chain hung off a sentinel
header node. The header stands for the dummy point (-inf, C(first)) used by
the Graham scan; it carries no numbers and is recognized by identity.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional


class Candidate:
    __slots__ = ("Q", "C", "trace", "prev", "next")

    def __init__(self, Q: float, C: float, trace=None):
        self.Q = Q
        self.C = C
        self.trace = trace
        self.prev = None
        self.next = None

    def __repr__(self):
        return f"Candidate(Q={self.Q!r}, C={self.C!r})"


@dataclass
class ScanStats:
    """Counters for convex pruning calls."""

    calls: int = 0
    moves: int = 0
    pruned: int = 0
    bound_violations: int = 0  # calls whose move count exceeded 2k

    def merge(self, other: "ScanStats") -> None:
        self.calls += other.calls
        self.moves += other.moves
        self.pruned += other.pruned
        self.bound_violations += other.bound_violations


class CandidateList:
    __slots__ = ("head", "size")

    def __init__(self, items: Iterable[Candidate] = ()):
        head = Candidate(0.0, 0.0)
        head.prev = head.next = head
        self.head = head
        self.size = 0
        for c in items:
            self.append(c)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> "CandidateList":
        """Build a list from ``(Q, C)`` pairs given in list order."""
        return cls(Candidate(q, c) for q, c in pairs)

    def __len__(self):
        return self.size

    def __bool__(self):
        return self.size > 0

    def __iter__(self) -> Iterator[Candidate]:
        head = self.head
        p = head.next
        while p is not head:
            nxt = p.next
            yield p
            p = nxt

    def __repr__(self):
        return f"CandidateList({self.pairs()!r})"

    def pairs(self) -> list[tuple[float, float]]:
        return [(c.Q, c.C) for c in self]

    @property
    def first(self) -> Optional[Candidate]:
        return self.head.next if self.size else None

    @property
    def last(self) -> Optional[Candidate]:
        return self.head.prev if self.size else None

    def append(self, c: Candidate) -> None:
        """Link ``c`` at the tail without any ordering check."""
        head = self.head
        tail = head.prev
        c.prev = tail
        c.next = head
        tail.next = c
        head.prev = c
        self.size += 1

    def insert_before(self, node: Candidate, c: Candidate) -> None:
        prev = node.prev
        c.prev = prev
        c.next = node
        prev.next = c
        node.prev = c
        self.size += 1

    def remove(self, node: Candidate) -> None:
        node.prev.next = node.next
        node.next.prev = node.prev
        self.size -= 1

    def push(self, c: Candidate) -> bool:
        """Tail-append for input arriving in non-decreasing C order.

        Drops ``c`` if the current tail dominates it, and evicts a tail of
        equal C that ``c`` beats on Q. Returns whether ``c`` was kept.
        """
        head = self.head
        tail = head.prev
        if tail is not head:
            if c.Q <= tail.Q:
                return False
            if c.C <= tail.C:
                self.remove(tail)
        self.append(c)
        return True

    def copy(self) -> "CandidateList":
        """Shallow copy: fresh nodes, shared traces."""
        out = CandidateList()
        for c in self:
            out.append(Candidate(c.Q, c.C, c.trace))
        return out

    def check(self) -> None:
        """Raise AssertionError unless the list is strictly increasing in Q and C."""
        n = 0
        prev = None
        head = self.head
        p = head.next
        while p is not head:
            assert p.prev.next is p and p.next.prev is p, "broken links"
            if prev is not None:
                assert p.C > prev.C, f"C not increasing at {p!r} after {prev!r}"
                assert p.Q > prev.Q, f"Q not increasing at {p!r} after {prev!r}"
            prev = p
            p = p.next
            n += 1
        assert n == self.size, f"size {self.size} but {n} nodes linked"


def dominates(a: Candidate, b: Candidate) -> bool:
    return a.Q >= b.Q and a.C <= b.C


def insert_pruned(lst: CandidateList, c: Candidate) -> CandidateList:
    """Insert one candidate, keeping the list nonredundant. Mutates ``lst``.

    An exact (Q, C) duplicate of an existing member is rejected.
    """
    head = lst.head
    p = head.next
    while p is not head and p.C < c.C:
        p = p.next
    pred = p.prev
    if pred is not head and pred.Q >= c.Q:
        return lst
    if p is not head and p.C == c.C and p.Q >= c.Q:
        return lst
    while p is not head and p.Q <= c.Q:
        nxt = p.next
        lst.remove(p)
        p = nxt
    lst.insert_before(p, c)
    return lst


def left_turn(a1: Candidate, a2: Candidate, a3: Candidate) -> bool:
    """True when ``a2`` lies on or below the chord from ``a1`` to ``a3``.

    Slopes are compared cross-multiplied; collinear middles count as a turn.
    """
    assert a1.C < a2.C < a3.C
    return (a2.Q - a1.Q) * (a3.C - a2.C) <= (a3.Q - a2.Q) * (a2.C - a1.C)


def convex_prune(lst: CandidateList, stats: Optional[ScanStats] = None) -> CandidateList:
    """Graham scan over a sorted nonredundant list, in place.

    Leaves the upper-left hull of the (C, Q) points. Every loop step is one
    forward or backward move; the total is bounded by twice the input size.
    """
    k = lst.size
    head = lst.head
    a1 = head
    a2 = a1.next
    a3 = a2.next
    moves = 0
    pruned = 0
    while a3 is not head and a2 is not head:
        if a1 is not head and (a2.Q - a1.Q) * (a3.C - a2.C) <= (a3.Q - a2.Q) * (a2.C - a1.C):
            # unlink a2 and step back
            a1.next = a3
            a3.prev = a1
            pruned += 1
            a2 = a1
            a1 = a1.prev
        else:
            a3 = a3.next
            a2 = a2.next
            a1 = a1.next
        moves += 1
    lst.size = k - pruned
    if stats is not None:
        stats.calls += 1
        stats.moves += moves
        stats.pruned += pruned
        if moves > 2 * k:
            stats.bound_violations += 1
    assert moves <= 2 * k, f"convex_prune made {moves} moves on {k} candidates"
    return lst


def convex_hull(lst: CandidateList, stats: Optional[ScanStats] = None) -> list[Candidate]:
    """Non-destructive Graham scan: the hull members of ``lst`` as a Python list.

    Same hull and move accounting as :func:`convex_prune`, but ``lst`` is
    left untouched.
    """
    k = lst.size
    stack: list[Candidate] = []
    moves = 0
    for c in lst:
        while len(stack) >= 2:
            a1 = stack[-2]
            a2 = stack[-1]
            if (a2.Q - a1.Q) * (c.C - a2.C) <= (c.Q - a2.Q) * (a2.C - a1.C):
                stack.pop()
                moves += 1
            else:
                break
        stack.append(c)
        moves += 1
    if stats is not None:
        stats.calls += 1
        stats.moves += moves
        stats.pruned += k - len(stack)
        if moves > 2 * k:
            stats.bound_violations += 1
    assert moves <= 2 * k, f"convex_hull made {moves} moves on {k} candidates"
    return stack


def merge_sorted(lst: CandidateList, betas: Iterable[Candidate]) -> CandidateList:
    """Merge C-sorted new candidates into ``lst`` in a single pass.

    ``betas`` must be in non-decreasing C order. The nodes of ``lst`` are
    relinked into the returned list, so ``lst`` must not be used afterwards.
    At equal C, members of ``lst`` come first, so exact duplicates keep the
    incumbent.
    """
    out = CandidateList()
    head = lst.head
    p = head.next
    for b in betas:
        while p is not head and p.C <= b.C:
            nxt = p.next
            out.push(p)
            p = nxt
        out.push(b)
    while p is not head:
        nxt = p.next
        out.push(p)
        p = nxt
    return out


def nonredundant(points: Iterable[tuple[float, float]]) -> list[tuple[float, float]]:
    """Quadratic reference: the nonredundant subset of ``(Q, C)`` points, C-sorted.

    Duplicates collapse to one point. Used as an independent oracle in tests.
    """
    pts = sorted(set(points), key=lambda p: (p[1], p[0]))
    keep = []
    for i, (q, c) in enumerate(pts):
        if any(q2 >= q and c2 <= c for j, (q2, c2) in enumerate(pts) if j != i):
            continue
        keep.append((q, c))
    return keep
