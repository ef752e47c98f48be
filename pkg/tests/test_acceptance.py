"""Acceptance gate: one test per criterion, each printing a single pass/fail line.

Run with ``pytest tests/test_acceptance.py -v``; the lines appear even when
output capture is on.
"""

from __future__ import annotations

import json
import random
import time
from contextlib import contextmanager

import pytest

from cantor_forge.analyzer import RankReport, brute_force_rank, distance_right_ce, proper_rank_of_point, rank_report
from cantor_forge.cli import main
from cantor_forge.constructions import construct_G, realize, staged, symbolic_G, symbolic_H, symbolic_K, symbolic_Km
from cantor_forge.corpus import random_interval_set, random_point, random_tree
from cantor_forge.intervals import (
    Interval,
    IntervalSet,
    count_disjoint_clopen_intersecting,
    distance_to_other_components,
    hausdorff_distance,
)
from cantor_forge.numerics import Dyadic, dyadic, pow2
from cantor_forge.oracles import OracleSpec, TargetSet, empty_oracle, full_oracle
from cantor_forge.tree import Block, Union, dumps_tree, tree_from_json
from cantor_forge.corpus import random_oracle
from cantor_forge.verify import (
    clopen_count_brute,
    first_k_oracle,
    g_variants,
    h_oracles,
    km_targets,
    late_witness_oracle,
    random_ball,
)

SEED = 20240601


@pytest.fixture
def criterion(capsys):
    @contextmanager
    def run(number: int, title: str, limit: float | None = None):
        start = time.perf_counter()
        status, note = "FAIL", ""
        try:
            yield
            elapsed = time.perf_counter() - start
            if limit is not None and elapsed >= limit:
                note = f" over the {limit:g} s limit"
                raise AssertionError(f"criterion {number} took {elapsed:.2f} s, limit {limit:g} s")
            status = "PASS"
        finally:
            elapsed = time.perf_counter() - start
            with capsys.disabled():
                print(f"\n[{status}] criterion {number}: {title} ({elapsed:.2f} s){note}")

    return run


def test_criterion_1_G_geometry(criterion):
    with criterion(1, "G geometry at stage 5 and the finite-union case", limit=1.0):
        full = construct_G(full_oracle(1), 5)
        blocks = [Interval(1 - pow2(-k), 1 - pow2(-k) + pow2(-(k + 2))) for k in range(6)]
        assert full == IntervalSet([*blocks, Interval(1, 1)])
        assert full.intervals == (*blocks, Interval(1, 1))
        assert construct_G(empty_oracle(1), 5) == IntervalSet([Interval(0, dyadic("63/64")), Interval(1, 1)])
        finite = symbolic_G(first_k_oracle(3))
        assert isinstance(finite, Union) and len(finite.parts) == 4
        assert all(isinstance(p, Block) for p in finite.parts)


def every_construction(rng: random.Random) -> list:
    sets = [staged("G", oracle=o) for o in (full_oracle(1), empty_oracle(1), first_k_oracle(3), late_witness_oracle())]
    for m in range(1, 4):
        sets += [staged("H", oracle=o, m=m) for o in (full_oracle(m), empty_oracle(m), random_oracle(rng, m))]
    for target in (TargetSet(6, frozenset({1, 5})), TargetSet(6, frozenset({3}))):
        sets += [staged("Km", target=target, m=m) for m in range(1, 6)]
        sets.append(staged("K", target=target))
    return sets


def test_criterion_2_Km_table(criterion):
    with criterion(2, "rho(K_m) table, m = 1..5, both membership cases", limit=10.0):
        cases = 0
        for m in range(1, 6):
            targets = km_targets(m)
            if m % 2:
                assert {m in t for t in targets} == {True, False}
            for target in targets:
                expected = {0, m + 1} if m % 2 and m not in target else {0, m}
                assert set(rank_report(symbolic_Km(target, m), m + 2).rho) == expected, (m, target)
                cases += 1
        assert cases == 10


def test_criterion_3_rho_K(criterion):
    with criterion(3, "rho(K) = A at truncation 6", limit=30.0):
        with_odds = TargetSet(6, frozenset({1, 5}))
        evens = TargetSet(6, frozenset())
        assert set(rank_report(symbolic_K(with_odds), 6).rho) == {0, 1, 2, 4, 5, 6}
        assert set(rank_report(symbolic_K(evens), 6).rho) == {0, 2, 4, 6}


def test_criterion_4_clopen_equivalence(criterion):
    with criterion(4, "clopen count equals brute force on 1000 samples", limit=30.0):
        rng = random.Random(SEED)
        mismatches = 0
        for _ in range(1000):
            s, ball = random_interval_set(rng, 5, 4), random_ball(rng, 4)
            assert len(s) <= 5
            if count_disjoint_clopen_intersecting(s, ball) != clopen_count_brute(s, ball):
                mismatches += 1
        assert mismatches == 0


def test_criterion_5_rank_oracle(criterion):
    with criterion(5, "rank rules agree with brute force on 100 depth-2 trees", limit=60.0):
        rng = random.Random(SEED)
        bad = []
        for i in range(100):
            t = random_tree(rng, 2)
            stage = realize(t, 3)
            for x in sorted({random_point(rng, stage) for _ in range(6)}):
                a, b = proper_rank_of_point(t, x), brute_force_rank(t, x)
                if a != b:
                    bad.append((i, str(x), a, b))
        assert bad == []


def test_criterion_6_H_blocks(criterion):
    with criterion(6, "H_m interiors have rank 0 and rank(1) <= m, m <= 5"):
        rng = random.Random(SEED)
        violations = []
        for m in range(1, 6):
            for label, o in h_oracles(m, rng):
                t = symbolic_H(o, m)
                for c in rank_report(t, m + 1).components:
                    if c.has_interior and c.rank != 0:
                        violations.append((m, label, str(c.span)))
                if proper_rank_of_point(t, Dyadic(1)) > m:
                    violations.append((m, label, "rank(1)"))
        assert violations == []


def test_criterion_7_right_ce_distance(criterion):
    with criterion(7, "right-c.e. distance on three G oracles"):
        budget = 8
        for label, o, probe in g_variants():
            x = dyadic(probe)
            seq = distance_right_ce(staged("G", oracle=o), x, budget)
            assert all(b <= a for a, b in zip(seq, seq[1:])), label
            assert seq[-1] == distance_to_other_components(realize(symbolic_G(o), budget), x), label


def test_criterion_8_convergence(criterion):
    with criterion(8, "K stages converge to the symbolic set; all stages monotone"):
        target = TargetSet(6, frozenset({1, 5}))
        t = symbolic_K(target)
        K = staged("K", target=target)
        for s in range(3, 11):
            assert hausdorff_distance(K(s), realize(t, s)) <= pow2(-(s - 2)), s
        for S in every_construction(random.Random(SEED)):
            prev = S(0)
            for s in range(1, 13):
                cur = S(s)
                assert cur.contains_set(prev), (S.name, s)
                prev = cur


def test_criterion_9_determinism(criterion, tmp_path, capsys):
    with criterion(9, "byte-identical reruns and JSON round-trips"):
        target = tmp_path / "a.json"
        target.write_text(json.dumps(TargetSet(6, frozenset({1, 5})).to_json()))
        oracle = tmp_path / "o.json"
        oracle.write_text(json.dumps(full_oracle(2).to_json()))
        outputs: dict[str, list[bytes]] = {}
        for run in range(2):
            d = tmp_path / f"run{run}"
            d.mkdir()
            commands = [
                ["construct", "--set", "K", "--target", str(target), "--symbolic", "--out", str(d / "k.tree.json")],
                ["construct", "--set", "H", "--m", "2", "--oracle", str(oracle), "--stage", "6", "--out", str(d / "h.set.json")],
                ["realize", "--tree", str(d / "k.tree.json"), "--depth", "5", "--out", str(d / "k.set.json")],
                ["rank", "--tree", str(d / "k.tree.json"), "--truncate", "6", "--depth", "4",
                 "--out", str(d / "k.rank.json"), "--svg", str(d / "k.svg")],
                ["render", "--set", str(d / "h.set.json"), "--svg", str(d / "h.svg"), "--ascii"],
                ["verify", "--suite", "km", "--out", str(d / "km.tsv")],
            ]
            for i, argv in enumerate(commands):
                assert main(argv) == 0, argv
                outputs.setdefault(f"stdout of {argv[0]} #{i}", []).append(capsys.readouterr().out.encode())
            for f in sorted(d.iterdir()):
                outputs.setdefault(f.name, []).append(f.read_bytes())
        for name, runs in outputs.items():
            assert len(runs) == 2 and runs[0] == runs[1], name

        d = tmp_path / "run0"
        loaders = {
            "k.tree.json": lambda p: {"tree": json.loads(dumps_tree(tree_from_json(p["tree"])))["tree"]},
            "h.set.json": lambda p: IntervalSet.from_json(p).to_json(),
            "k.set.json": lambda p: IntervalSet.from_json(p).to_json(),
            "k.rank.json": lambda p: RankReport.from_json(p).to_json(),
        }
        for name, reparse in loaders.items():
            payload = json.loads((d / name).read_text())
            assert reparse(payload) == payload, name
        for obj, cls in ((full_oracle(3), OracleSpec), (TargetSet(6, frozenset({1, 5})), TargetSet)):
            text = json.dumps(obj.to_json(), sort_keys=True)
            assert json.dumps(cls.from_json(json.loads(text)).to_json(), sort_keys=True) == text
