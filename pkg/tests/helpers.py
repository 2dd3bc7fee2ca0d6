import dataclasses
import math
import random
from fractions import Fraction

from bufinsert.generate import gen_net
from bufinsert.net import Driver

# relative agreement required between different summation orders; the
# absolute floor only matters when a slack lands within rounding of zero
REL_TOL = 1e-9
ABS_FLOOR = 1e-21


def close(a, b):
    return abs(a - b) <= max(REL_TOL * max(abs(a), abs(b)), ABS_FLOOR)


def small_instance(seed):
    """At most 10 positions and 3 buffer types: brute-force territory."""
    rng = random.Random(f"small:{seed}")
    n = rng.randint(0, 10)
    b = rng.randint(1, 3)
    m = rng.randint(1, 4)
    frac = rng.choice([1.0, 0.6, 0.3])
    tree, lib = gen_net(m, n, b, seed=seed, allowed_fraction=frac)
    if rng.random() < 0.3:
        tree = dataclasses.replace(tree, driver=Driver(rng.uniform(100, 2000), rng.uniform(0, 5e-11)))
    return tree, lib


def medium_instance(seed, max_n=500, max_b=64, max_m=60):
    """Log-uniform sizes up to the given bounds."""
    rng = random.Random(f"medium:{seed}")
    n = int(math.exp(rng.uniform(0, math.log(max_n + 1)))) - 1
    b = int(math.exp(rng.uniform(0, math.log(max_b + 1))))
    m = int(math.exp(rng.uniform(0, math.log(max_m + 1))))
    frac = rng.choice([1.0, 1.0, 0.5, 0.2])
    tree, lib = gen_net(m, min(n, max_n), min(b, max_b), seed=seed, allowed_fraction=frac)
    if rng.random() < 0.3:
        tree = dataclasses.replace(tree, driver=Driver(rng.uniform(100, 2000), rng.uniform(0, 5e-11)))
    return tree, lib


def random_staircase(rng, k, c_scale=1e-15, q_scale=1e-12):
    """k points strictly increasing in both C and Q, as (Q, C) pairs."""
    cs = sorted(rng.sample(range(1, 50 * k + 2), k))
    qs = sorted(rng.sample(range(-30 * k, 30 * k + 1), k))
    return [((q + 0.5 * rng.random()) * q_scale, (c + 0.5 * rng.random()) * c_scale) for q, c in zip(qs, cs)]


def hull_oracle(pairs):
    """Members strictly above every chord between an earlier and a later member.

    Exact rational arithmetic over all triples, not just neighbours.
    """
    pts = [(Fraction(q), Fraction(c)) for q, c in pairs]
    keep = []
    for j, (qj, cj) in enumerate(pts):
        below = False
        for i in range(j):
            qi, ci = pts[i]
            for k in range(j + 1, len(pts)):
                qk, ck = pts[k]
                # chord value at cj
                chord = qi + (qk - qi) * (cj - ci) / (ck - ci)
                if qj <= chord:
                    below = True
                    break
            if below:
                break
        if not below:
            keep.append(pairs[j])
    return keep
