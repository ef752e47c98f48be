from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cantor_forge.constructions import realize, symbolic_G, symbolic_H, symbolic_K, symbolic_Km
from cantor_forge.corpus import random_tree
from cantor_forge.intervals import affine_image
from cantor_forge.numerics import Dyadic, dyadic
from cantor_forge.oracles import TargetSet, empty_oracle, full_oracle
from cantor_forge.tree import (
    Block,
    Cluster,
    Generator,
    Union,
    depth,
    dumps_tree,
    transform,
    tree_from_json,
    tree_to_json,
    validate,
)

A15 = TargetSet(6, frozenset({1, 5}))
HALF, QUARTER = dyadic("1/2"), dyadic("1/4")


def test_block_must_be_nondegenerate():
    with pytest.raises(ValueError):
        Block(1, 1)


def test_cluster_checks():
    with pytest.raises(ValueError):
        Cluster(1, -1, dyadic("3/4"), (Block(0, 1),))
    with pytest.raises(ValueError):
        Cluster(1, -1, QUARTER, (Block(0, 1),), 0, ((2, 1),))
    with pytest.raises(ValueError):
        Cluster(1, -1, QUARTER, (Block(0, 1),), 0, ((2, 0), (2, None)))
    c = Cluster(1, -1, QUARTER, (Block(0, 1), Block(0, HALF)), 0, ((0, 1), (3, None)))
    assert c.template_at(0) == Block(0, HALF)
    assert c.template_at(3) is None and c.template_at(9) == Block(0, 1)
    assert c.first_generic() == 1
    assert [k for k, _ in c.occurring()] == [0, 1]


def test_validate_flags_problems():
    assert validate(Union((Block(0, 1), Block(HALF, 2)))) != []
    assert validate(Union((Block(0, 1), Block(1, 2)))) != []
    tangent = Union((Cluster(1, -1, QUARTER, (Block(0, 1),)), Block(1, 2)))
    assert validate(tangent) == []
    crowded = Cluster(1, -1, Dyadic(1), (Block(0, 1),))
    assert any("not separated" in p or "contain the limit" in p for p in validate(crowded))
    assert validate(Cluster(1, -1, QUARTER, (Block(0, 1),), None, ((0, 0),))) != []


def test_depth():
    assert depth(Block(0, 1)) == 0
    assert depth(symbolic_H(full_oracle(3), 3)) == 3
    assert depth(symbolic_K(A15)) == float("inf")


def test_isometries_commute_with_realize():
    # the schedule looks at absolute scales, so only |a| = 1 commutes exactly
    t = symbolic_H(full_oracle(2), 2)
    for a, b in ((Dyadic(-1), Dyadic(3)), (Dyadic(1), dyadic("5/8"))):
        assert realize(transform(t, a, b), 4) == affine_image(realize(t, 4), a, b)
    with pytest.raises(ValueError):
        transform(t, dyadic("3/4"), Dyadic(0))


TREES = [
    Block(0, 1),
    symbolic_G(full_oracle(1)),
    symbolic_G(empty_oracle(1)),
    symbolic_H(full_oracle(3), 3),
    symbolic_Km(A15, 3),
    symbolic_K(A15),
]


@pytest.mark.parametrize("t", TREES, ids=range(len(TREES)))
def test_json_round_trip(t):
    payload = json.loads(dumps_tree(t))
    back = tree_from_json(payload["tree"])
    assert back == t
    assert dumps_tree(back) == dumps_tree(t)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_trees_round_trip_and_validate(seed):
    t = random_tree(random.Random(seed))
    assert validate(t) == []
    assert tree_from_json(tree_to_json(t)) == t


def test_bad_payloads():
    for bad in ({"type": "blob"}, {"type": "block", "lo": 0}, {"type": "cluster", "limit": "1"}):
        with pytest.raises(ValueError):
            tree_from_json(bad)
    with pytest.raises((ValueError, KeyError)):
        tree_from_json(
            {"type": "cluster", "limit": "1", "shift": "-1", "scale": "1/2^2", "generator": {"family": "nope"}}
        )


def test_generator_children_match_family():
    k = symbolic_K(A15)
    assert k.generator == Generator.of("K_m", bound=6, odd_members=[1, 5])
    assert k.template_at(3) == symbolic_Km(A15, 3)
