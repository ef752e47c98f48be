"""Named property suites with a tab-separated pass/fail report."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Callable, Iterator

from .analyzer import brute_force_rank, distance_right_ce, proper_rank_of_point, rank_report
from .constructions import realize, staged, symbolic_G, symbolic_H, symbolic_K, symbolic_Km
from .corpus import random_interval_set, random_oracle, random_point, random_tree
from .intervals import (
    Ball,
    IntervalSet,
    count_disjoint_clopen_intersecting,
    distance_to_other_components,
    enumerate_clopen_decompositions,
    hausdorff_distance,
)
from .numerics import dyadic, format_extended, pow2
from .oracles import Level, OracleSpec, TargetSet, empty_oracle, full_oracle

log = logging.getLogger(__name__)

SUITES = ("lemma-infinitely", "blocks", "km", "k", "inner")


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    detail: str = ""

    def row(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return f"{self.suite}\t{self.name}\t{status}\t{self.detail}"


def report(checks: list[Check]) -> str:
    return "\n".join(["suite\tcheck\tstatus\tdetail", *(c.row() for c in checks)])


# -- oracles used across suites ----------------------------------------------


def first_k_oracle(n: int) -> OracleSpec:
    """Depth-1 oracle whose only true leaves are ``k < n``."""
    return OracleSpec(1, (Level(False, frozenset((k,) for k in range(n))),))


def late_witness_oracle() -> OracleSpec:
    """Full oracle except ``k = 5``, refuted only at stage 4."""
    return OracleSpec(1, (Level(True, frozenset({(5,)})),), {(5,): 4})


def g_variants() -> list[tuple[str, OracleSpec, str]]:
    """(label, oracle, probe point) triples whose probe component never grows."""
    return [
        ("full@1", full_oracle(1), "1"),
        ("first3@1/8", first_k_oracle(3), "1/8"),
        ("late-witness@1/8", late_witness_oracle(), "1/8"),
    ]


# -- brute-force maximum for clopen counting ---------------------------------


def clopen_count_brute(s: IntervalSet, ball: Ball) -> int:
    """Largest number of groups meeting ``ball`` over all groupings of components."""
    comps = s.intervals
    best = 0
    for groups in enumerate_clopen_decompositions(s, len(comps)):
        hits = sum(1 for g in groups if any(comps[i].meets_ball(ball) for i in g))
        best = max(best, hits)
    return best


def random_ball(rng: random.Random, grid: int = 4) -> Ball:
    center = pow2(-grid) * rng.randint(-(1 << (grid - 2)), (1 << grid) + (1 << (grid - 2)))
    return Ball(center, pow2(-rng.randint(0, grid)) * rng.randint(1, 3))


# -- suites -------------------------------------------------------------------


def suite_lemma_infinitely(seed: int, samples: int = 1000, trees: int = 100) -> Iterator[Check]:
    rng = random.Random(seed)
    mismatches = []
    for _ in range(samples):
        s, ball = random_interval_set(rng), random_ball(rng)
        fast, slow = count_disjoint_clopen_intersecting(s, ball), clopen_count_brute(s, ball)
        if fast != slow:
            mismatches.append(f"{s} B({ball.center},{ball.radius}): {fast} vs {slow}")
    yield Check("lemma-infinitely", f"clopen-count[{samples}]", not mismatches, "; ".join(mismatches[:3]))

    rng = random.Random(seed + 1)
    bad, points = [], 0
    for i in range(trees):
        t = random_tree(rng, 2)
        stage = realize(t, 3)
        probes = {random_point(rng, stage) for _ in range(6)}
        for x in sorted(probes):
            points += 1
            a, b = proper_rank_of_point(t, x), brute_force_rank(t, x)
            if a != b:
                bad.append(f"tree {i} x={x}: rules {a}, brute force {b}")
    yield Check("lemma-infinitely", f"rank-oracle[{trees} trees, {points} points]", not bad, "; ".join(bad[:3]))


def h_oracles(m: int, rng: random.Random, extra: int = 3) -> list[tuple[str, OracleSpec]]:
    out = [("full", full_oracle(m)), ("empty", empty_oracle(m))]
    out += [(f"random{i}", random_oracle(rng, m)) for i in range(extra)]
    return out


def suite_blocks(seed: int, max_m: int = 5) -> Iterator[Check]:
    rng = random.Random(seed)
    for m in range(1, max_m + 1):
        for label, o in h_oracles(m, rng):
            t = symbolic_H(o, m)
            rep = rank_report(t, m + 1)
            bad = [str(c.span) for c in rep.components if c.has_interior and c.rank != 0]
            r1 = proper_rank_of_point(t, dyadic(1))
            ok = not bad and r1 <= m
            yield Check("blocks", f"H_{m}[{label}]", ok, f"rank(1)={format_extended(r1)}" + (f" bad={bad}" if bad else ""))
    for kind, kwargs in (
        ("G", {"oracle": full_oracle(1)}),
        ("G", {"oracle": first_k_oracle(3)}),
        ("H", {"oracle": full_oracle(3), "m": 3}),
        ("H", {"oracle": empty_oracle(2), "m": 2}),
        ("Km", {"target": TargetSet(6, frozenset({3})), "m": 3}),
        ("K", {"target": TargetSet(6, frozenset({1, 5}))}),
    ):
        yield _monotone(staged(kind, **kwargs), 12)


def _monotone(S, top: int) -> Check:
    prev = S(0)
    for s in range(1, top + 1):
        cur = S(s)
        if not cur.contains_set(prev):
            return Check("blocks", f"monotone[{S.name}]", False, f"stage {s - 1} not inside stage {s}")
        prev = cur
    return Check("blocks", f"monotone[{S.name}]", True, f"stages 0..{top}")


def km_targets(m: int) -> list[TargetSet]:
    """Two targets per ``m``; for odd ``m`` they differ in whether ``m`` is a member.

    Targets always contain the evens, so for even ``m`` the pair varies the
    odd members instead.
    """
    if m % 2:
        return [TargetSet(m + 1, frozenset({m})), TargetSet(m + 1, frozenset())]
    return [TargetSet(m + 1, frozenset(range(1, m + 1, 2))), TargetSet(m + 1, frozenset())]


def suite_km(max_m: int = 5) -> Iterator[Check]:
    for m in range(1, max_m + 1):
        for target in km_targets(m):
            in_a = m in target
            expected = {0, m + 1} if m % 2 and not in_a else {0, m}
            got = set(rank_report(symbolic_Km(target, m), m + 2).rho)
            odd = ",".join(map(str, sorted(target.odd_members))) or "-"
            name = f"K_{m}[{'m in A' if in_a else 'm not in A'}; odd members {odd}]"
            yield Check("km", name, got == expected, f"rho={sorted(got)} expected={sorted(expected)}")


def targets(bound: int) -> list[TargetSet]:
    odds = [k for k in range(1, bound + 1, 2)]
    out = [TargetSet(bound, frozenset()), TargetSet(bound, frozenset(odds))]
    out.append(TargetSet(bound, frozenset(k for k in (1, 5) if k <= bound)))
    return out


def suite_k(truncate: int = 6, top: int = 10) -> Iterator[Check]:
    for target in targets(truncate):
        t = symbolic_K(target)
        got = set(rank_report(t, truncate).rho)
        expected = set(target.members())
        yield Check("k", f"rho(K)[A={sorted(expected)}]", got == expected, f"rho={sorted(got)}")
    target = TargetSet(truncate, frozenset(k for k in (1, 5) if k <= truncate))
    t = symbolic_K(target)
    worst = []
    for s in range(3, top + 1):
        h = hausdorff_distance(staged("K", target=target)(s), realize(t, s))
        if h > pow2(-(s - 2)):
            worst.append(f"s={s}: {h}")
    yield Check("k", f"convergence[s=3..{top}]", not worst, "; ".join(worst))


def suite_inner(budget: int = 8) -> Iterator[Check]:
    for label, o, probe in g_variants():
        x = dyadic(probe)
        seq = distance_right_ce(staged("G", oracle=o), x, budget)
        monotone = all(b <= a for a, b in zip(seq, seq[1:]))
        exact = distance_to_other_components(realize(symbolic_G(o), budget), x)
        ok = monotone and seq[-1] == exact
        detail = f"final={format_extended(seq[-1])} exact={format_extended(exact)}"
        yield Check("inner", f"G[{label}]", ok, detail)
    # the single-component case stays at the marker
    block = staged("G", oracle=empty_oracle(1))
    seq = distance_right_ce(block, dyadic("1/2"), budget)
    yield Check("inner", "G[empty]@1/2", seq[-1] == dyadic("1/2"), f"final={format_extended(seq[-1])}")


def run_suite(name: str, *, seed: int = 0, truncate: int = 6) -> list[Check]:
    runners: dict[str, Callable[[], Iterator[Check]]] = {
        "lemma-infinitely": lambda: suite_lemma_infinitely(seed),
        "blocks": lambda: suite_blocks(seed),
        "km": suite_km,
        "k": lambda: suite_k(truncate),
        "inner": suite_inner,
    }
    if name not in runners:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    checks = []
    for check in runners[name]():
        log.info("%s", check.row())
        checks.append(check)
    return checks
