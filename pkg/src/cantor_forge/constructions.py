"""The oracle-driven closed sets G, H_m, K_m and K.

Each set comes in two forms:

* a staged enumeration ``stage s -> IntervalSet`` that only grows with ``s``
  and only asks the oracle questions with budget ``s`` (the c.e. witness);
* an exact :mod:`cascade tree <cantor_forge.tree>` for the limit set, built
  from the oracle's ground truth.

Geometry. ``G`` is ``{1}`` together with, for every ``k >= 0``, the block
``[1 - 2^-k, 1 - 2^-k + 2^-(k+2)]``, extended up to ``1 - 2^-(k+1)`` once
``(forall l) <k, l> in O`` is refuted. ``H`` nests copies of itself placed by
``x -> (1 - 2^-k) + 2^-(k+2) x``, bottoming out in ``G``. ``K_m`` joins a
full-oracle ``H~_m``, the block ``[1, 2]`` and, for odd ``m``, the reflection
``3 - H_{m+1}``. ``K`` lines copies of ``K_m`` up under
``x -> 1 - 2^-m + 2^-(m+3) + 2^-(m+4) x`` and adds ``{1}``. Copy ``m`` ends at
``1 - 11 * 2^-(m+4)`` and copy ``m+1`` starts at ``1 - 7 * 2^-(m+4)``.

Stage schedule. A child with index ``k`` whose absolute scale (product of
placement factors down from the root) is ``S`` enters at stage ``s`` when
``k <= s`` and ``S >= 2^-(s + SLACK)``. The index bound alone would put
``(s+1)^(m-1)`` copies into ``H_m``; the scale bound keeps every stage finite
and small while still converging. :func:`realize` truncates trees with the
same rule.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Any, Callable, Mapping

from .intervals import Interval, IntervalSet
from .numerics import ONE, ZERO, Dyadic, dyadic, pow2
from .oracles import OracleSpec, TargetSet, build_oracle_for_target, forall_holds, full_oracle
from .tree import Block, Cluster, Generator, Tree, Union, child_map, register_family, transform

__all__ = [
    "SLACK",
    "StagedSet",
    "admits",
    "construct_G",
    "construct_H",
    "construct_K",
    "construct_Km",
    "realize",
    "staged",
    "symbolic_G",
    "symbolic_H",
    "symbolic_K",
    "symbolic_Km",
]

#: Extra binary digits of resolution granted beyond the stage number.
SLACK = 5

_QUARTER = pow2(-2)
_K_SHIFT = dyadic(-1) + pow2(-3)  # -7/8
_K_SCALE = pow2(-4)


def admits(k: int, scale: Dyadic, s: int) -> bool:
    """Does a child with index ``k`` and absolute scale ``scale`` enter at stage ``s``?"""
    return 0 <= k <= s and abs(scale) >= pow2(-(s + SLACK))


@dataclass(frozen=True)
class StagedSet:
    """A c.e. closed set given by its stages ``s -> IntervalSet``."""

    name: str
    ambient: Interval
    fn: Callable[[int], IntervalSet]

    def __call__(self, s: int) -> IntervalSet:
        if s < 0:
            raise ValueError("stage must be >= 0")
        return self.fn(s)


class _Emitter:
    """Collects intervals in absolute coordinates under a current affine map."""

    def __init__(self) -> None:
        self.out: list[Interval] = []

    def emit(self, a: Dyadic, b: Dyadic, lo: Dyadic, hi: Dyadic) -> None:
        x, y = a * lo + b, a * hi + b
        self.out.append(Interval(x, y) if x <= y else Interval(y, x))

    def result(self) -> IntervalSet:
        return IntervalSet(self.out)


# -- staged enumerations ----------------------------------------------------


def _g_stage(em: _Emitter, o: OracleSpec, prefix: tuple[int, ...], s: int, a: Dyadic, b: Dyadic) -> None:
    em.emit(a, b, ONE, ONE)
    for k in range(s + 1):
        if not admits(k, a * pow2(-(k + 2)), s):
            break
        start = ONE - pow2(-k)
        end = start + pow2(-(k + 2))
        if forall_holds(o, prefix, k, budget=s).refuted:
            end = ONE - pow2(-(k + 1))
        em.emit(a, b, start, end)


def _h_stage(
    em: _Emitter, o: OracleSpec, prefix: tuple[int, ...], level: int, s: int, a: Dyadic, b: Dyadic
) -> None:
    if level == 1:
        _g_stage(em, o, prefix, s, a, b)
        return
    em.emit(a, b, ONE, ONE)
    for k in range(s + 1):
        scale = pow2(-(k + 2))
        if not admits(k, a * scale, s):
            break
        # child placed by x -> (1 - 2^-k) + 2^-(k+2) x
        _h_stage(em, o, prefix + (k,), level - 1, s, a * scale, a * (ONE - pow2(-k)) + b)


def construct_G(o: OracleSpec, s: int) -> IntervalSet:
    if o.depth != 1:
        raise ValueError("G needs a depth-1 oracle")
    em = _Emitter()
    _g_stage(em, o, (), s, ONE, ZERO)
    return em.result()


def construct_H(o: OracleSpec, m: int, s: int) -> IntervalSet:
    if m < 1 or o.depth != m:
        raise ValueError(f"H_{m} needs m >= 1 and a depth-{m} oracle")
    em = _Emitter()
    _h_stage(em, o, (), m, s, ONE, ZERO)
    return em.result()


def _km_stage(em: _Emitter, target: TargetSet, m: int, s: int, a: Dyadic, b: Dyadic) -> None:
    if m >= 1:
        _h_stage(em, full_oracle(m), (), m, s, a, b)
    em.emit(a, b, ONE, dyadic(2))
    if m % 2 == 1:
        # 3 - H_{m+1}
        _h_stage(em, build_oracle_for_target(target, m), (), m + 1, s, -a, a * 3 + b)


def construct_Km(target: TargetSet, m: int, s: int) -> IntervalSet:
    if m < 0:
        raise ValueError("m must be >= 0")
    em = _Emitter()
    _km_stage(em, target, m, s, ONE, ZERO)
    return em.result()


def construct_K(target: TargetSet, s: int) -> IntervalSet:
    em = _Emitter()
    em.emit(ONE, ZERO, ONE, ONE)
    for m in range(s + 1):
        if not admits(m, _K_SCALE * pow2(-m), s):
            break
        a, b = _K_SCALE * pow2(-m), ONE + _K_SHIFT * pow2(-m)
        _km_stage(em, target, m, s, a, b)
    return em.result()


def staged(kind: str, *, oracle: OracleSpec | None = None, target: TargetSet | None = None, m: int = 1) -> StagedSet:
    """Wrap one of the constructions as a :class:`StagedSet`."""
    unit = Interval(ZERO, ONE)
    if kind == "G":
        return StagedSet("G", unit, functools.partial(construct_G, oracle))
    if kind == "H":
        return StagedSet(f"H_{m}", unit, functools.partial(construct_H, oracle, m))
    if kind == "Km":
        return StagedSet(f"K_{m}", Interval(ZERO, dyadic(3)), functools.partial(construct_Km, target, m))
    if kind == "K":
        return StagedSet("K", unit, functools.partial(construct_K, target))
    raise ValueError(f"unknown construction {kind!r}")


# -- symbolic trees ---------------------------------------------------------


def _g_blocks_finite(o: OracleSpec, prefix: tuple[int, ...], upto: int) -> list[Interval]:
    """Blocks ``G_k`` for ``k < upto`` plus the telescoped tail ``[1 - 2^-upto, 1]``."""
    out = [Interval(ONE - pow2(-upto), ONE)]
    for k in range(upto):
        start = ONE - pow2(-k)
        end = ONE - pow2(-(k + 1)) if not o.leaf_holds(prefix + (k,)) else start + pow2(-(k + 2))
        out.append(Interval(start, end))
    return out


def _symbolic_g(o: OracleSpec, prefix: tuple[int, ...]) -> Tree:
    generic = o.generic(prefix)
    specials = o.special_values(prefix)
    if not o.leaf_holds(prefix + (generic,)):
        # finitely many gaps survive: a finite union of blocks
        upto = max(specials, default=-1) + 1
        blocks = IntervalSet(_g_blocks_finite(o, prefix, upto))
        parts = tuple(Block(iv.lo, iv.hi) for iv in blocks)
        return parts[0] if len(parts) == 1 else Union(parts)
    # infinitely many gaps: children are the maximal blocks, each starting at
    # some G_k and running through the next k' >= k whose condition holds
    horizon = max(specials, default=-1) + 1
    templates: list[Tree] = [Block(ZERO, ONE)]
    by_run: dict[int, int] = {0: 0}
    exceptions: list[tuple[int, int | None]] = []
    k = 0
    while k <= horizon:
        end = k
        while not o.leaf_holds(prefix + (end,)):
            end += 1
        run = end - k
        if run not in by_run:
            # block [1 - 2^-k, 1 - 2^-end + 2^-(end+2)] in child-k coordinates
            by_run[run] = len(templates)
            templates.append(Block(ZERO, dyadic(4) - 3 * pow2(-run)))
        if by_run[run] != 0:
            exceptions.append((k, by_run[run]))
        exceptions.extend((j, None) for j in range(k + 1, end + 1))
        k = end + 1
    return Cluster(ONE, dyadic(-1), _QUARTER, tuple(templates), 0, tuple(exceptions))


def symbolic_G(o: OracleSpec) -> Tree:
    if o.depth != 1:
        raise ValueError("G needs a depth-1 oracle")
    return _symbolic_g(o, ())


def _symbolic_h(o: OracleSpec, prefix: tuple[int, ...], level: int) -> Tree:
    if level == 1:
        return _symbolic_g(o, prefix)
    generic = o.generic(prefix)
    templates = [_symbolic_h(o, prefix + (generic,), level - 1)]
    exceptions = []
    for k in o.special_values(prefix):
        exceptions.append((k, len(templates)))
        templates.append(_symbolic_h(o, prefix + (k,), level - 1))
    return Cluster(ONE, dyadic(-1), _QUARTER, tuple(templates), 0, tuple(exceptions))


def symbolic_H(o: OracleSpec, m: int) -> Tree:
    if m < 1 or o.depth != m:
        raise ValueError(f"H_{m} needs m >= 1 and a depth-{m} oracle")
    return _symbolic_h(o, (), m)


def _target_params(target: TargetSet) -> dict[str, Any]:
    return {"bound": target.bound, "odd_members": sorted(target.odd_members)}


def _target_from(params: Mapping[str, Any]) -> TargetSet:
    return TargetSet(int(params["bound"]), frozenset(int(x) for x in params["odd_members"]))


@functools.lru_cache(maxsize=None)
def symbolic_Km(target: TargetSet, m: int) -> Tree:
    if m < 0:
        raise ValueError("m must be >= 0")
    parts: list[Tree] = []
    if m >= 1:
        parts.append(symbolic_H(full_oracle(m), m))
    parts.append(Block(ONE, dyadic(2)))
    if m % 2 == 1:
        h = symbolic_H(build_oracle_for_target(target, m), m + 1)
        parts.append(transform(h, dyadic(-1), dyadic(3)))
    return Union(tuple(parts))


class _KmFamily:
    """Children ``m -> K_m`` of the top cluster of K."""

    frame = Interval(ZERO, dyadic(3))

    def child(self, params: Mapping[str, Any], k: int) -> Tree:
        return symbolic_Km(_target_from(params), k)

    def child_rank(self, params: Mapping[str, Any], k: int) -> int:
        target = _target_from(params)
        return k + 1 if k % 2 == 1 and k not in target else k

    def limit_rank(self, params: Mapping[str, Any]) -> float:
        return float("inf")

    def sup_rank(self, params: Mapping[str, Any]) -> float:
        return float("inf")

    def stable_from(self, params: Mapping[str, Any], bound: int) -> int:
        # rho(K_m) lies in {0, m, m + 1}
        return bound + 1


register_family("K_m", _KmFamily())


def symbolic_K(target: TargetSet) -> Tree:
    return Cluster(ONE, _K_SHIFT, _K_SCALE, generator=Generator.of("K_m", **_target_params(target)))


# -- realization ------------------------------------------------------------


def _realize(em: _Emitter, t: Tree, d: int, a: Dyadic, b: Dyadic) -> None:
    if isinstance(t, Block):
        em.emit(a, b, t.lo, t.hi)
        return
    if isinstance(t, Union):
        for p in t.parts:
            _realize(em, p, d, a, b)
        return
    em.emit(a, b, t.limit, t.limit)
    for k in range(d + 1):
        ca, cb = child_map(t, k)
        if not admits(k, a * ca, d):
            break
        tpl = t.template_at(k)
        if tpl is not None:
            _realize(em, tpl, d, a * ca, a * cb + b)


def realize(t: Tree, d: int) -> IntervalSet:
    """Finite truncation of ``t``: children admitted at stage ``d``, limits as points."""
    if d < 0:
        raise ValueError("depth must be >= 0")
    em = _Emitter()
    _realize(em, t, d, ONE, ZERO)
    return em.result()
