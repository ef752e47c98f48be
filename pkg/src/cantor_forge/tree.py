"""Cascade trees: exact symbolic descriptions of self-similar compact sets.

Three node kinds:

``Block``
    a nondegenerate closed interval.
``Cluster``
    a limit point ``p`` with children indexed by ``k = 0, 1, ...``. Child ``k``
    is the image of a template tree under ``x -> p + (shift + scale * x) * 2**-k``,
    so children shrink geometrically and accumulate exactly at ``p``.
    ``scale`` must be ``±2**j`` so placements invert exactly. Children come
    either from a finite template list (a default template for all but
    finitely many ``k``, plus exceptions; ``None`` means no child at that
    index), or from a registered generator family.
``Union``
    finitely many parts, positively separated except where a cluster limit
    coincides with a block endpoint (a tangency).

Every cluster child is at positive distance from everything else in the
represented set, so it is clopen there; the rank rules in
:mod:`cantor_forge.analyzer` rely on that.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterator, Mapping, Protocol, Union as _U

from .intervals import Interval
from .numerics import Dyadic, dyadic, pow2

__all__ = [
    "Block",
    "Cluster",
    "Generator",
    "GeneratorFamily",
    "Tree",
    "Union",
    "child_map",
    "depth",
    "empty",
    "family",
    "hull",
    "register_family",
    "transform",
    "tree_from_json",
    "tree_to_json",
    "validate",
]


@dataclass(frozen=True)
class Block:
    lo: Dyadic
    hi: Dyadic

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", dyadic(self.lo))
        object.__setattr__(self, "hi", dyadic(self.hi))
        if not self.lo < self.hi:
            raise ValueError(f"block [{self.lo}, {self.hi}] must be nondegenerate")

    @property
    def interval(self) -> Interval:
        return Interval(self.lo, self.hi)


@dataclass(frozen=True)
class Generator:
    """Reference to a registered child family plus its JSON-able parameters."""

    family: str
    params: tuple[tuple[str, Any], ...] = ()

    @classmethod
    def of(cls, family: str, **params: Any) -> "Generator":
        return cls(family, tuple(sorted((k, _freeze(v)) for k, v in params.items())))

    @property
    def kwargs(self) -> dict[str, Any]:
        return dict(self.params)

    def impl(self) -> "GeneratorFamily":
        return family(self.family)

    def child(self, k: int) -> "Tree":
        return self.impl().child(self.kwargs, k)


@dataclass(frozen=True)
class Cluster:
    limit: Dyadic
    shift: Dyadic
    scale: Dyadic
    templates: tuple["Tree", ...] = ()
    default: int | None = 0
    exceptions: tuple[tuple[int, int | None], ...] = ()
    generator: Generator | None = None

    def __post_init__(self) -> None:
        for name in ("limit", "shift", "scale"):
            object.__setattr__(self, name, dyadic(getattr(self, name)))
        if not self.scale.is_power_of_two():
            raise ValueError("cluster scale must be ±2**j")
        exc = tuple(sorted(((int(k), i) for k, i in self.exceptions), key=lambda p: p[0]))
        object.__setattr__(self, "exceptions", exc)
        if len({k for k, _ in exc}) != len(exc):
            raise ValueError("duplicate exception index")
        object.__setattr__(self, "_exc", dict(exc))
        if self.generator is not None:
            if self.templates or exc:
                raise ValueError("generator clusters take no templates")
            object.__setattr__(self, "default", None)
            return
        indices = [i for _, i in exc if i is not None]
        if self.default is not None:
            indices.append(self.default)
        for i in indices:
            if not 0 <= i < len(self.templates):
                raise ValueError(f"template index {i} out of range")

    @property
    def exception_map(self) -> dict[int, int | None]:
        return dict(self._exc)

    @property
    def infinite(self) -> bool:
        """Does the cluster have infinitely many children?"""
        return self.generator is not None or self.default is not None

    def template_at(self, k: int) -> "Tree | None":
        if self.generator is not None:
            return self.generator.child(k)
        idx = self._exc.get(k, self.default)
        return None if idx is None else self.templates[idx]

    def first_generic(self) -> int:
        taken = {k for k, _ in self.exceptions}
        k = 0
        while k in taken:
            k += 1
        return k

    def occurring(self) -> list[tuple[int, "Tree"]]:
        """``(first index, template)`` for every template that occurs."""
        first: dict[int, int] = {}
        for k, i in self.exceptions:
            if i is not None and i not in first:
                first[i] = k
        if self.default is not None:
            g = self.first_generic()
            if self.default not in first or g < first[self.default]:
                first[self.default] = g
        return sorted(((k, self.templates[i]) for i, k in first.items()), key=lambda p: p[0])

    def max_exception(self) -> int:
        return max((k for k, _ in self.exceptions), default=-1)


@dataclass(frozen=True)
class Union:
    parts: tuple["Tree", ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "parts", tuple(self.parts))


Tree = _U[Block, Cluster, Union]


def empty() -> Union:
    return Union(())


def _freeze(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return tuple(_freeze(v) for v in value)
    if isinstance(value, dict):
        return tuple(sorted((k, _freeze(v)) for k, v in value.items()))
    return value


def _thaw(value: Any) -> Any:
    if isinstance(value, tuple):
        return [_thaw(v) for v in value]
    return value


# -- generator families -----------------------------------------------------


class GeneratorFamily(Protocol):
    """Children ``k -> tree`` with declared rank data.

    ``child_rank(params, k)`` is the declared maximal proper rank in child
    ``k``; ``limit_rank(params)`` the declared supremum of those over all but
    finitely many ``k``; ``sup_rank(params)`` the supremum over all ``k``.
    ``stable_from(params, M)`` is an index from which ``rho(child k)``
    restricted to ``[0, M]`` no longer changes. ``frame`` bounds every child
    template.
    """

    frame: Interval

    def child(self, params: Mapping[str, Any], k: int) -> Tree: ...

    def child_rank(self, params: Mapping[str, Any], k: int) -> float | int: ...

    def limit_rank(self, params: Mapping[str, Any]) -> float | int: ...

    def sup_rank(self, params: Mapping[str, Any]) -> float | int: ...

    def stable_from(self, params: Mapping[str, Any], bound: int) -> int: ...


_FAMILIES: dict[str, GeneratorFamily] = {}


def register_family(name: str, impl: GeneratorFamily) -> None:
    _FAMILIES[name] = impl


def family(name: str) -> GeneratorFamily:
    try:
        return _FAMILIES[name]
    except KeyError:
        raise ValueError(f"unknown generator family {name!r}") from None


# -- geometry ---------------------------------------------------------------


def child_map(c: Cluster, k: int) -> tuple[Dyadic, Dyadic]:
    """``(a, b)`` with child ``k`` the image of its template under ``a*x + b``."""
    f = pow2(-k)
    return c.scale * f, c.limit + c.shift * f


def transform(t: Tree, a: Dyadic, b: Dyadic) -> Tree:
    """Image of the whole tree under ``x -> a*x + b``.

    Templates stay untouched: composing with the child placement only moves
    the limit and rescales ``shift``/``scale``.
    """
    a, b = dyadic(a), dyadic(b)
    if a == 0:
        raise ValueError("affine scale must be nonzero")
    if isinstance(t, Block):
        lo, hi = a * t.lo + b, a * t.hi + b
        return Block(min(lo, hi), max(lo, hi))
    if isinstance(t, Union):
        return Union(tuple(transform(p, a, b) for p in t.parts))
    if not a.is_power_of_two():
        raise ValueError("clusters only admit ±2**j rescaling")
    return Cluster(
        a * t.limit + b, a * t.shift, a * t.scale, t.templates, t.default, t.exceptions, t.generator
    )


def _image(iv: Interval, a: Dyadic, b: Dyadic) -> Interval:
    lo, hi = a * iv.lo + b, a * iv.hi + b
    return Interval(min(lo, hi), max(lo, hi))


def hull(t: Tree) -> Interval | None:
    """Smallest interval containing the set (a superset for generator clusters)."""
    if isinstance(t, Block):
        return t.interval
    if isinstance(t, Union):
        hs = [h for h in map(hull, t.parts) if h is not None]
        if not hs:
            return None
        return Interval(min(h.lo for h in hs), max(h.hi for h in hs))
    pieces = [Interval(t.limit, t.limit)]
    if t.generator is not None:
        a, b = child_map(t, 0)
        pieces.append(_image(t.generator.impl().frame, a, b))
    else:
        for k, tpl in t.occurring():
            h = hull(tpl)
            if h is not None:
                pieces.append(_image(h, *child_map(t, k)))
    return Interval(min(p.lo for p in pieces), max(p.hi for p in pieces))


def frame_hull(t: Cluster) -> Interval | None:
    """Hull of all child templates, in template coordinates."""
    if t.generator is not None:
        return t.generator.impl().frame
    hs = [h for _, tpl in t.occurring() if (h := hull(tpl)) is not None]
    if not hs:
        return None
    return Interval(min(h.lo for h in hs), max(h.hi for h in hs))


def depth(t: Tree) -> int | float:
    """Cluster nesting depth (generator clusters count as unbounded)."""
    if isinstance(t, Block):
        return 0
    if isinstance(t, Union):
        return max((depth(p) for p in t.parts), default=0)
    if t.generator is not None:
        return float("inf")
    return 1 + max((depth(tpl) for _, tpl in t.occurring()), default=0)


def iter_nodes(t: Tree) -> Iterator[Tree]:
    """Every node reachable through templates (generators not expanded)."""
    seen: set[int] = set()
    stack = [t]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        yield node
        if isinstance(node, Union):
            stack.extend(node.parts)
        elif isinstance(node, Cluster):
            stack.extend(node.templates)


# -- validation -------------------------------------------------------------


def validate(t: Tree, samples: int = 10) -> list[str]:
    """Check the structural invariants; returns a list of problems (empty if ok).

    Child separation is checked on the first ``samples`` indices; the
    geometric placement makes the pattern repeat at every finer scale.
    """
    problems: list[str] = []
    _validate(t, samples, problems, set())
    return problems


def _validate(t: Tree, samples: int, problems: list[str], seen: set[int]) -> None:
    if id(t) in seen:
        return
    seen.add(id(t))
    if isinstance(t, Block):
        return
    if isinstance(t, Union):
        hs = sorted(
            ((h, p) for p in t.parts if (h := hull(p)) is not None), key=lambda hp: (hp[0].lo, hp[0].hi)
        )
        for (h1, p1), (h2, p2) in zip(hs, hs[1:]):
            if h1.hi > h2.lo:
                problems.append(f"union parts overlap: {h1} and {h2}")
            elif h1.hi == h2.lo and not _tangent(p1, p2, h1.hi):
                problems.append(f"union parts touch at {h1.hi} without a declared tangency")
        for p in t.parts:
            _validate(p, samples, problems, seen)
        return
    fh = frame_hull(t)
    if fh is not None:
        lo = t.shift + t.scale * fh.lo
        hi = t.shift + t.scale * fh.hi
        if min(lo, hi) <= 0 <= max(lo, hi):
            problems.append(f"children of cluster at {t.limit} would contain the limit")
    regions = []
    for k in range(samples):
        tpl = t.template_at(k)
        if tpl is None:
            continue
        h = hull(tpl)
        if h is not None:
            regions.append(_image(h, *child_map(t, k)))
    regions.sort(key=lambda iv: iv.lo)
    for r1, r2 in zip(regions, regions[1:]):
        if not r1.hi < r2.lo:
            problems.append(f"children of cluster at {t.limit} not separated: {r1} and {r2}")
    if not t.infinite:
        problems.append(f"cluster at {t.limit} has finitely many children (isolated limit point)")
    for tpl in t.templates:
        _validate(tpl, samples, problems, seen)


def _tangent(p1: Tree, p2: Tree, x: Dyadic) -> bool:
    def role(p: Tree) -> set[str]:
        roles = set()
        if isinstance(p, Block) and x in (p.lo, p.hi):
            roles.add("block")
        elif isinstance(p, Cluster) and p.limit == x:
            roles.add("limit")
        elif isinstance(p, Union):
            for q in p.parts:
                h = hull(q)
                if h is not None and x in (h.lo, h.hi):
                    roles |= role(q)
        return roles

    # a tangency joins a block endpoint to a cluster limit
    r1, r2 = role(p1), role(p2)
    return ("block" in r1 and "limit" in r2) or ("limit" in r1 and "block" in r2)


# -- json -------------------------------------------------------------------


def tree_to_json(t: Tree) -> dict:
    if isinstance(t, Block):
        return {"type": "block", "lo": str(t.lo), "hi": str(t.hi)}
    if isinstance(t, Union):
        return {"type": "union", "parts": [tree_to_json(p) for p in t.parts]}
    out: dict[str, Any] = {
        "type": "cluster",
        "limit": str(t.limit),
        "shift": str(t.shift),
        "scale": str(t.scale),
    }
    if t.generator is not None:
        out["generator"] = {
            "family": t.generator.family,
            "params": {k: _thaw(v) for k, v in t.generator.params},
        }
    else:
        out["templates"] = [tree_to_json(tpl) for tpl in t.templates]
        out["default"] = t.default
        out["exceptions"] = [[k, i] for k, i in t.exceptions]
    return out


def tree_from_json(payload: Mapping) -> Tree:
    try:
        kind = payload["type"]
        if kind == "block":
            return Block(Dyadic.parse(payload["lo"]), Dyadic.parse(payload["hi"]))
        if kind == "union":
            return Union(tuple(tree_from_json(p) for p in payload["parts"]))
        if kind == "cluster":
            common = (
                Dyadic.parse(payload["limit"]),
                Dyadic.parse(payload["shift"]),
                Dyadic.parse(payload["scale"]),
            )
            if "generator" in payload:
                gen = payload["generator"]
                family(gen["family"])
                return Cluster(*common, generator=Generator.of(gen["family"], **gen.get("params", {})))
            return Cluster(
                *common,
                templates=tuple(tree_from_json(p) for p in payload["templates"]),
                default=payload.get("default"),
                exceptions=tuple((int(k), i) for k, i in payload.get("exceptions", [])),
            )
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValueError(f"bad tree payload: {exc}") from exc
    raise ValueError(f"unknown tree node type {payload.get('type')!r}")


def dumps_tree(t: Tree) -> str:
    return json.dumps({"tree": tree_to_json(t)}, indent=2, sort_keys=True)
