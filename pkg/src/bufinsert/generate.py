"""Seeded synthetic nets at the scales of published buffer-insertion benchmarks.

Technology numbers follow a 180 nm process: wire 0.076 ohm/um and
0.118 fF/um, sinks 2-41 fF, buffers with R in 180-7000 ohm, C in 0.7-23 fF
and K in 29-36.4 ps.
"""
from __future__ import annotations

import heapq
import math
import random
from typing import Optional

from .net import BufferLibrary, BufferType, Edge, RoutingTree, Sink

WIRE_R_PER_UM = 0.076
WIRE_C_PER_UM = 0.118e-15
SINK_C_RANGE = (2e-15, 41e-15)
SINK_RAT_RANGE = (0.0, 1e-9)
BUFFER_R_RANGE = (180.0, 7000.0)
BUFFER_C_RANGE = (0.7e-15, 23e-15)
BUFFER_K_RANGE = (29e-12, 36.4e-12)
EDGE_LENGTH_UM = (10.0, 2000.0)


def _log_uniform(lo: float, hi: float, u: float) -> float:
    x = math.exp(math.log(lo) + u * (math.log(hi) - math.log(lo)))
    return min(max(x, min(lo, hi)), max(lo, hi))


def gen_library(b: int, seed: int = 0) -> BufferLibrary:
    """``b`` buffer types; each value is log-uniform over its range.

    Size drives R down and C up together, so the library spans weak to
    strong buffers rather than mostly dominated ones.
    """
    rng = random.Random(f"lib:{seed}:{b}")
    bufs = []
    for i in range(b):
        u = rng.random()
        uc = min(1.0, max(0.0, u + rng.uniform(-0.1, 0.1)))
        R = _log_uniform(*BUFFER_R_RANGE[::-1], u)
        C = _log_uniform(*BUFFER_C_RANGE, uc)
        K = _log_uniform(*BUFFER_K_RANGE, rng.random())
        bufs.append(BufferType(f"buf{i:03d}", R, C, K))
    return BufferLibrary(f"gen-b{b}-s{seed}", tuple(bufs))


def gen_net(
    m: int,
    n: int,
    b: int = 8,
    seed: int = 0,
    allowed_fraction: float = 1.0,
    library: Optional[BufferLibrary] = None,
) -> tuple[RoutingTree, BufferLibrary]:
    """Random binary routing tree with ``m`` sinks and ``n`` buffer positions.

    Sinks are paired at random until one subtree remains, which the source
    drives through a single edge. Edge lengths are uniform in 10-2000 um.
    Positions are created by repeatedly splitting the edge whose pieces are
    currently longest into one more equal piece. With ``allowed_fraction``
    below 1 each position allows a random nonempty subset of the library.
    The topology does not depend on ``b``.
    """
    if m < 1 or n < 0:
        raise ValueError("need m >= 1 and n >= 0")
    lib = library if library is not None else gen_library(b, seed)
    rng = random.Random(f"net:{seed}:{m}:{n}")
    width = len(str(max(m, n, 1)))

    sinks = {}
    for i in range(m):
        sinks[f"s{i:0{width}d}"] = Sink(rng.uniform(*SINK_C_RANGE), rng.uniform(*SINK_RAT_RANGE))

    # (parent, child, length in um)
    spans: list[tuple[str, str, float]] = []
    pool = list(sinks)
    steiner = {}
    t = 0
    while len(pool) > 1:
        i, j = sorted(rng.sample(range(len(pool)), 2))
        right = pool.pop(j)
        left = pool.pop(i)
        node = f"t{t:0{width}d}"
        t += 1
        steiner[node] = ()
        for child in (left, right):
            spans.append((node, child, rng.uniform(*EDGE_LENGTH_UM)))
        pool.append(node)
    spans.append(("src", pool[0], rng.uniform(*EDGE_LENGTH_UM)))

    pieces = [0] * len(spans)
    heap = [(-length, k) for k, (_, _, length) in enumerate(spans)]
    heapq.heapify(heap)
    for _ in range(n):
        _, k = heapq.heappop(heap)
        pieces[k] += 1
        heapq.heappush(heap, (-spans[k][2] / (pieces[k] + 1), k))

    ids = [bt.id for bt in lib.buffers]
    internal = dict(steiner)
    edges = []
    p = 0
    for k, (parent, child, length) in enumerate(spans):
        seg = length / (pieces[k] + 1)
        R = WIRE_R_PER_UM * seg
        C = WIRE_C_PER_UM * seg
        prev = parent
        for _ in range(pieces[k]):
            v = f"p{p:0{width}d}"
            p += 1
            if allowed_fraction >= 1.0:
                internal[v] = tuple(ids)
            else:
                subset = [x for x in ids if rng.random() < allowed_fraction]
                internal[v] = tuple(subset or [rng.choice(ids)])
            edges.append(Edge(prev, v, R, C))
            prev = v
        edges.append(Edge(prev, child, R, C))

    tree = RoutingTree("src", sinks, internal, tuple(edges), None, lib.name)
    return tree, lib
