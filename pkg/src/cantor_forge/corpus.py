"""Deterministic random inputs for verification runs and tests."""

from __future__ import annotations

import random

from .intervals import Interval, IntervalSet
from .numerics import Dyadic, dyadic, pow2
from .oracles import Level, OracleSpec
from .tree import Block, Cluster, Tree, Union

# Leaf shapes on [0, 1]. Every cluster below puts child k inside
# [1 - 2^-k, 1 - 2^-k + 2^-(k+2)] or its mirror image, so siblings keep a gap.
_LEAF_BLOCKS = ((0, 1), (0, "1/2"), ("1/2", 1), ("1/4", "3/4"))


def _leaf(rng: random.Random) -> Block:
    lo, hi = rng.choice(_LEAF_BLOCKS)
    return Block(dyadic(lo), dyadic(hi))


def _cluster(rng: random.Random, templates: list[Tree], tail: bool) -> Cluster:
    """Cluster on [0, 1] accumulating at 1 (``tail``) or at 0."""
    exceptions = []
    for k in rng.sample(range(6), rng.randint(0, 3)):
        exceptions.append((k, rng.choice([None, *range(len(templates))])))
    default = rng.randrange(len(templates))
    if tail:
        return Cluster(1, -1, dyadic("1/4"), tuple(templates), default, tuple(exceptions))
    # child k sits in [3 * 2^-(k+3), 2^-(k+1)], inside [0, 1/2]
    return Cluster(0, dyadic("1/2"), dyadic("-1/8"), tuple(templates), default, tuple(exceptions))


def random_tree(rng: random.Random, max_depth: int = 2) -> Tree:
    """Random valid cascade tree of cluster depth at most ``max_depth``."""
    if max_depth == 0:
        return _leaf(rng)

    def template(d: int) -> Tree:
        if d > 0 and rng.random() < 0.5:
            return random_tree(rng, d)
        return _leaf(rng)

    templates = [template(max_depth - 1) for _ in range(rng.randint(1, 2))]
    c = _cluster(rng, templates, tail=rng.random() < 0.7)
    if c.limit == 1 and rng.random() < 0.4:
        # a block tangent at the limit point
        return Union((c, Block(1, dyadic("3/2"))))
    return c


def random_interval_set(rng: random.Random, max_components: int = 5, grid: int = 4) -> IntervalSet:
    """Up to ``max_components`` intervals with endpoints on the ``2^-grid`` lattice of [0, 1]."""
    n = rng.randint(1, max_components)
    ivs = []
    for _ in range(n):
        a, b = sorted(rng.randint(0, 1 << grid) for _ in range(2))
        ivs.append(Interval(pow2(-grid) * a, pow2(-grid) * b))
    return IntervalSet(ivs)


def random_oracle(rng: random.Random, depth: int, width: int = 4) -> OracleSpec:
    """Oracle whose marks deviate from their defaults on short prefixes only."""
    levels = []
    for j in range(depth):
        exceptions = set()
        for _ in range(rng.randint(0, 3)):
            exceptions.add(tuple(rng.randrange(width) for _ in range(j + 1)))
        levels.append(Level(rng.random() < 0.5, frozenset(exceptions)))
    stages = {}
    for _ in range(rng.randint(0, 2)):
        stages[tuple(rng.randrange(width) for _ in range(depth))] = rng.randrange(6)
    return OracleSpec(depth, tuple(levels), stages)


def random_point(rng: random.Random, s: IntervalSet) -> Dyadic:
    """A point of ``s``: an endpoint or a midpoint of a random component."""
    iv = rng.choice(s.intervals)
    return rng.choice([iv.lo, iv.hi, (iv.lo + iv.hi).shift(-1)])
