"""Proper ranks, distinguished components and the invariant rho.

Definitions. A point is *1-proper* if every neighbourhood meets infinitely
many pairwise disjoint clopen sets, and *n-proper* if every neighbourhood
contains infinitely many (n-1)-proper points. Its proper rank is the largest
such ``n`` (0 if none, ``inf`` if unbounded). The rank of a set is the
largest rank of its points. ``rho(X)`` collects the ranks of the connected
components of ``X`` that have nonempty interior.

On cascade trees the definitions reduce to three rules:

R1  a point of a block that is not a cluster limit has rank 0 (a small
    neighbourhood is connected, and a connected set meets at most one of
    several disjoint clopen sets);
R2  a cluster limit with infinitely many children has rank
    ``1 + sup{max_rank(T) : T occurs as a child infinitely often}``: every
    child is clopen, every neighbourhood of the limit contains all but
    finitely many children, and the finitely many exceptional children stay
    at positive distance;
R3  where a cluster limit is also a block endpoint, the point keeps its R2
    rank.

:func:`brute_force_rank` checks the rules against the definitions on finite
truncations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .constructions import StagedSet, admits
from .intervals import (
    Ball,
    Interval,
    IntervalSet,
    components_intersecting,
    count_disjoint_clopen_intersecting,
    distance_to_other_components,
)
from .numerics import INFINITY, ONE, ZERO, Dyadic, dyadic, format_extended, pow2
from .tree import Block, Cluster, Tree, Union, child_map, depth, frame_hull, hull, iter_nodes

__all__ = [
    "Component",
    "RankReport",
    "brute_force_rank",
    "check_ball_n_proper_budgeted",
    "check_generators",
    "distance_right_ce",
    "limit_rank",
    "max_rank",
    "proper_rank_of_point",
    "rank_report",
    "rho",
]

RankValue = float  # int or math.inf; ints compare and add correctly with inf


def _fmt_rank(r: RankValue) -> int | str:
    return "inf" if r == INFINITY else int(r)


def _parse_rank(v: int | str) -> RankValue:
    return INFINITY if v == "inf" else int(v)


class _Ranks:
    """Rank computations memoized by node identity for one analysis run."""

    def __init__(self) -> None:
        self._max: dict[int, RankValue] = {}
        self._limit: dict[int, RankValue] = {}
        self._keep: list[Tree] = []

    def limit_rank(self, c: Cluster) -> RankValue:
        key = id(c)
        if key not in self._limit:
            self._keep.append(c)
            if not c.infinite:
                r: RankValue = 0
            elif c.generator is not None:
                r = 1 + c.generator.impl().limit_rank(c.generator.kwargs)
            else:
                r = 1 + self.max_rank(c.templates[c.default])
            self._limit[key] = r
        return self._limit[key]

    def max_rank(self, t: Tree) -> RankValue:
        key = id(t)
        if key in self._max:
            return self._max[key]
        self._keep.append(t)
        if isinstance(t, Block):
            r: RankValue = 0
        elif isinstance(t, Union):
            r = max((self.max_rank(p) for p in t.parts), default=0)
        elif t.generator is not None:
            r = max(self.limit_rank(t), t.generator.impl().sup_rank(t.generator.kwargs))
        else:
            r = max([self.limit_rank(t), *(self.max_rank(tpl) for _, tpl in t.occurring())])
        self._max[key] = r
        return r

    def rank_at(self, t: Tree, x: Dyadic) -> RankValue | None:
        if isinstance(t, Block):
            return 0 if t.lo <= x <= t.hi else None
        if isinstance(t, Union):
            found = [r for p in t.parts if (r := self.rank_at(p, x)) is not None]
            return max(found) if found else None
        if x == t.limit:
            return self.limit_rank(t)
        fh = frame_hull(t)
        if fh is None:
            return None
        ends = (abs(t.shift + t.scale * fh.lo), abs(t.shift + t.scale * fh.hi))
        rmin, rmax = min(ends), max(ends)
        dist = abs(x - t.limit)
        k = 0
        if rmin > 0:
            k = max(0, rmin.log2_floor() - dist.log2_floor() - 1)
        while pow2(-k) * rmax >= dist:
            tpl = t.template_at(k)
            if tpl is not None:
                a, b = child_map(t, k)
                r = self.rank_at(tpl, (x - b) * a.reciprocal())
                if r is not None:
                    return r
            k += 1
        return None


def limit_rank(c: Cluster) -> RankValue:
    """Rank of a cluster's limit point (rule R2)."""
    return _Ranks().limit_rank(c)


def max_rank(t: Tree) -> RankValue:
    """Proper rank of the whole set: the largest rank of any of its points."""
    return _Ranks().max_rank(t)


def proper_rank_of_point(t: Tree, x: Dyadic) -> RankValue:
    r = _Ranks().rank_at(t, dyadic(x))
    if r is None:
        raise ValueError(f"{x} is not in the set")
    return r


# -- components and rho -----------------------------------------------------


@dataclass(frozen=True)
class Component:
    span: Interval
    rank: RankValue
    has_interior: bool

    def to_json(self) -> dict:
        return {
            "lo": str(self.span.lo),
            "hi": str(self.span.hi),
            "rank": _fmt_rank(self.rank),
            "interior": self.has_interior,
        }

    @classmethod
    def from_json(cls, payload: dict) -> "Component":
        return cls(
            Interval(dyadic(payload["lo"]), dyadic(payload["hi"])),
            _parse_rank(payload["rank"]),
            bool(payload["interior"]),
        )


@dataclass(frozen=True)
class RankReport:
    """Listed components (a finite truncation) and the exact ``rho`` up to ``bound``."""

    components: tuple[Component, ...]
    rho: frozenset[int]
    bound: int

    def to_json(self) -> dict:
        return {
            "bound": self.bound,
            "rho": sorted(self.rho),
            "components": [c.to_json() for c in self.components],
        }

    @classmethod
    def from_json(cls, payload: dict) -> "RankReport":
        try:
            return cls(
                tuple(Component.from_json(c) for c in payload["components"]),
                frozenset(int(r) for r in payload["rho"]),
                int(payload["bound"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"bad rank report payload: {exc}") from exc

    def table(self) -> str:
        lines = ["lo\thi\trank\tinterior"]
        for c in self.components:
            lines.append(f"{c.span.lo}\t{c.span.hi}\t{format_extended(c.rank)}\t{str(c.has_interior).lower()}")
        lines.append(f"# rho = {{{', '.join(map(str, sorted(self.rho)))}}} (ranks <= {self.bound})")
        return "\n".join(lines)


_Atom = tuple[Interval, RankValue, bool]


def _merge_atoms(atoms: Iterable[_Atom]) -> list[Component]:
    out: list[list] = []
    for iv, r, interior in sorted(atoms, key=lambda a: (a[0].lo, a[0].hi)):
        if out and iv.lo <= out[-1][0].hi:
            last = out[-1]
            last[0] = Interval(last[0].lo, max(last[0].hi, iv.hi))
            last[1] = max(last[1], r)
            last[2] = last[2] or interior
        else:
            out.append([iv, r, interior])
    return [Component(iv, r, interior) for iv, r, interior in out]


def _top_atoms(t: Tree, ranks: _Ranks, out: list[_Atom], clusters: list[Cluster]) -> None:
    """Atoms of ``t`` outside every cluster child, in ``t``'s own coordinates."""
    if isinstance(t, Block):
        out.append((t.interval, 0, True))
    elif isinstance(t, Union):
        for p in t.parts:
            _top_atoms(p, ranks, out, clusters)
    else:
        out.append((Interval(t.limit, t.limit), ranks.limit_rank(t), False))
        clusters.append(t)


def _rho(t: Tree, bound: int, ranks: _Ranks, memo: dict[int, frozenset[int]]) -> frozenset[int]:
    key = id(t)
    if key in memo:
        return memo[key]
    atoms: list[_Atom] = []
    clusters: list[Cluster] = []
    _top_atoms(t, ranks, atoms, clusters)
    found = {
        int(c.rank)
        for c in _merge_atoms(atoms)
        if c.has_interior and c.rank != INFINITY and c.rank <= bound
    }
    for c in clusters:
        if c.generator is not None:
            stop = c.generator.impl().stable_from(c.generator.kwargs, bound)
            children = [c.template_at(k) for k in range(stop + 1)]
        else:
            children = [tpl for _, tpl in c.occurring()]
        for child in children:
            if child is not None:
                ranks._keep.append(child)
                found |= _rho(child, bound, ranks, memo)
    memo[key] = frozenset(found)
    return memo[key]


def rho(t: Tree, bound: int) -> frozenset[int]:
    """``rho`` of the represented set, restricted to ``[0, bound]``.

    Children of a cluster are clopen, so their components and ranks are the
    same as in their templates; only the top level needs merging across
    tangencies.
    """
    return _rho(t, bound, _Ranks(), {})


def _list_atoms(
    t: Tree, d: int, bound: int, a: Dyadic, b: Dyadic, ranks: _Ranks, out: list[_Atom]
) -> None:
    def image(lo: Dyadic, hi: Dyadic) -> Interval:
        x, y = a * lo + b, a * hi + b
        return Interval(min(x, y), max(x, y))

    if isinstance(t, Block):
        out.append((image(t.lo, t.hi), 0, True))
        return
    if isinstance(t, Union):
        for p in t.parts:
            _list_atoms(p, d, bound, a, b, ranks, out)
        return
    out.append((image(t.limit, t.limit), ranks.limit_rank(t), False))
    wanted: set[int] = set()
    if t.generator is not None:
        wanted.update(range(t.generator.impl().stable_from(t.generator.kwargs, bound) + 1))
    else:
        wanted.update(k for k, _ in t.occurring())
    k = 0
    while True:
        ca, cb = child_map(t, k)
        admitted = admits(k, a * ca, d)
        if not admitted and k > max(wanted, default=-1):
            break
        if admitted or k in wanted:
            tpl = t.template_at(k)
            if tpl is not None:
                ranks._keep.append(tpl)
                _list_atoms(tpl, d, bound, a * ca, a * cb + b, ranks, out)
        k += 1


def rank_report(t: Tree, bound: int, listing: int | None = None) -> RankReport:
    """Components of a finite truncation plus the exact ``rho`` up to ``bound``.

    The listing keeps every child admitted at stage ``listing`` (default
    ``bound``) and, at every cluster, the first child of each template, so
    every rank in ``rho`` shows up on some listed component.
    """
    if bound < 0:
        raise ValueError("truncation bound must be >= 0")
    ranks = _Ranks()
    atoms: list[_Atom] = []
    _list_atoms(t, bound if listing is None else listing, bound, ONE, ZERO, ranks, atoms)
    comps = tuple(_merge_atoms(atoms))
    return RankReport(comps, _rho(t, bound, ranks, {}), bound)


def check_generators(t: Tree, samples: int = 8) -> list[str]:
    """Spot-check declared generator ranks against computed ones for ``k <= samples``."""
    problems = []
    for node in iter_nodes(t):
        if isinstance(node, Cluster) and node.generator is not None:
            impl, params = node.generator.impl(), node.generator.kwargs
            for k in range(samples + 1):
                declared = impl.child_rank(params, k)
                computed = max_rank(node.template_at(k))
                if declared != computed:
                    problems.append(f"{node.generator.family}[{k}]: declared {declared}, computed {computed}")
    return problems


# -- brute force --------------------------------------------------------------


class _Truncator:
    """Index truncations ``X_N`` of a tree, optionally clipped to a window.

    ``X_N`` keeps children ``k <= N`` at every cluster. Subtrees whose hull
    misses the window are skipped; pieces meeting the closed window are
    enough to find every component meeting it, since two points of a window
    are joined inside it if at all.
    """

    def __init__(self, t: Tree) -> None:
        self.t = t
        self._hulls: dict[int, Interval | None] = {}
        self._full: dict[int, IntervalSet] = {}
        self._frames: dict[int, tuple[Dyadic, Dyadic] | None] = {}
        self._keep: list[Tree] = []

    def hull(self, t: Tree) -> Interval | None:
        key = id(t)
        if key not in self._hulls:
            self._keep.append(t)
            self._hulls[key] = hull(t)
        return self._hulls[key]

    def pieces(self, n: int, window: Interval | None = None) -> IntervalSet:
        if window is None and n in self._full:
            return self._full[n]
        out: list[tuple[Interval, int]] = []
        self._walk(self.t, n, ONE, ZERO, window, 0, out)
        result = IntervalSet(iv for iv, _ in out)
        if window is None:
            self._full[n] = result
        return result

    def _children(self, c: Cluster, n: int, a: Dyadic, b: Dyadic, window: Interval | None) -> range:
        """Child indices ``k <= n`` whose images can meet the window."""
        if window is None:
            return range(n + 1)
        key = id(c)
        if key not in self._frames:
            self._keep.append(c)
            fh = frame_hull(c)
            ends = () if fh is None else (abs(c.shift + c.scale * fh.lo), abs(c.shift + c.scale * fh.hi))
            self._frames[key] = (min(ends), max(ends)) if ends else None
        if self._frames[key] is None:
            return range(0)
        rmin, rmax = self._frames[key]
        # window in the cluster's own coordinates, relative to the limit
        inv = a.reciprocal()
        u, v = sorted(((window.lo - b) * inv - c.limit, (window.hi - b) * inv - c.limit))
        far = max(abs(u), abs(v))
        near = ZERO if u <= 0 <= v else min(abs(u), abs(v))
        if far == 0:
            return range(0)
        kmin = max(0, rmin.log2_floor() - far.log2_floor() - 1) if rmin > 0 else 0
        kmax = n if near == 0 else min(n, rmax.log2_floor() - near.log2_floor() + 1)
        return range(kmin, kmax + 1)

    def birth(self, x: Dyadic, n: int) -> int | None:
        """Least ``N <= n`` with ``x`` in ``X_N``."""
        out: list[tuple[Interval, int]] = []
        self._walk(self.t, n, ONE, ZERO, Interval(x, x), 0, out)
        return min((b for iv, b in out if x in iv), default=None)

    def _walk(
        self,
        t: Tree,
        n: int,
        a: Dyadic,
        b: Dyadic,
        window: Interval | None,
        born: int,
        out: list[tuple[Interval, int]],
    ) -> None:
        if window is not None:
            h = self.hull(t)
            if h is None:
                return
            x, y = a * h.lo + b, a * h.hi + b
            if max(x, y) < window.lo or min(x, y) > window.hi:
                return
        if isinstance(t, Block):
            x, y = a * t.lo + b, a * t.hi + b
            out.append((Interval(min(x, y), max(x, y)), born))
        elif isinstance(t, Union):
            for p in t.parts:
                self._walk(p, n, a, b, window, born, out)
        else:
            x = a * t.limit + b
            out.append((Interval(x, x), born))
            for k in self._children(t, n, a, b, window):
                tpl = t.template_at(k)
                if tpl is not None:
                    ca, cb = child_map(t, k)
                    self._walk(tpl, n, a * ca, a * cb + b, window, max(born, k), out)


class _BruteForce:
    """Literal evaluation of the n-proper definitions on index truncations.

    Both properties only get easier as the neighbourhood grows, so "every
    neighbourhood" is decided by small balls. For a point ``x`` the test
    ball has radius ``2^-J``, at most a quarter of the gap from ``x`` to the
    other components of the first truncation containing it. "Infinitely
    many" is read as "strictly more in ``X_Nb`` than in ``X_Na``" for two
    truncations deep enough that the children entering between them lie
    inside the ball exactly when ``x`` is a limit of such children.
    """

    MARGIN = 3
    HORIZON = 96

    def __init__(self, t: Tree) -> None:
        self.floor = 1 + max(
            (n.max_exception() for n in iter_nodes(t) if isinstance(n, Cluster)), default=-1
        )
        self.trunc = _Truncator(t)
        self._memo: dict[tuple[Dyadic, int], bool] = {}
        self._plan: dict[Dyadic, tuple[int, int, int]] = {}

    def plan(self, x: Dyadic) -> tuple[int, int, int]:
        if x in self._plan:
            return self._plan[x]
        home = self.trunc.birth(x, self.floor + self.HORIZON)
        if home is None:
            raise ValueError(f"{x} is not in the set")
        home = max(home, self.floor)
        gap = distance_to_other_components(self.trunc.pieces(home), x)
        j = 2 if gap == INFINITY else max(2, -(gap.shift(-2)).log2_floor())
        na = home + j + self.MARGIN
        self._plan[x] = (j, na, na + self.MARGIN)
        return self._plan[x]

    def measure(self, n: int, x: Dyadic, eps: Dyadic, size: int) -> int:
        ball = Ball(x, eps)
        near = self.trunc.pieces(size, Interval(x - eps, x + eps))
        hits = components_intersecting(near, ball)
        if n == 1:
            return len(hits)
        points = {e for iv in hits for e in (iv.lo, iv.hi) if e in ball}
        return sum(1 for y in points if self.is_proper(y, n - 1))

    def is_proper(self, x: Dyadic, n: int) -> bool:
        key = (x, n)
        if key not in self._memo:
            j, na, nb = self.plan(x)
            eps = pow2(-j)
            self._memo[key] = self.measure(n, x, eps, nb) > self.measure(n, x, eps, na)
        return self._memo[key]


def brute_force_rank(t: Tree, x: Dyadic) -> RankValue:
    """Proper rank of ``x`` straight from the definitions (depth <= 2 trees).

    Independent of the R-rules: it only looks at finite truncations as
    interval sets. Ranks never exceed the cluster nesting depth, which bounds
    the search.
    """
    d = depth(t)
    if d > 2:
        raise ValueError(f"brute force handles depth <= 2, got {d}")
    bf = _BruteForce(t)
    x = dyadic(x)
    bf.plan(x)
    r = 0
    for n in range(1, int(d) + 1):
        if not bf.is_proper(x, n):
            break
        r = n
    return r


# -- budgeted semi-decision procedures ---------------------------------------


def _grid_balls(outer: Ball, s: int) -> list[Ball]:
    step = pow2(-s)
    lo = outer.center - outer.radius
    balls = []
    i = math.floor(lo.shift(s).to_fraction())
    while True:
        c = step * i
        if c >= outer.center + outer.radius:
            break
        for j in range(1, s + 1):
            r = pow2(-j)
            if abs(c - outer.center) + r < outer.radius:
                balls.append(Ball(c, r))
        i += 1
    return balls


def _max_disjoint(balls: Sequence[Ball]) -> int:
    # interval scheduling on closed spans; formal disjointness is strict
    count, last_hi = 0, None
    for ball in sorted(balls, key=lambda b: b.center + b.radius):
        if last_hi is None or ball.center - ball.radius > last_hi:
            count += 1
            last_hi = ball.center + ball.radius
    return count


def _ball_evidence(x: IntervalSet, ball: Ball, n: int, s: int) -> bool:
    need = max(s, 1)
    if n == 1:
        return count_disjoint_clopen_intersecting(x, ball) >= need
    found = [
        b
        for b in _grid_balls(ball, s)
        if components_intersecting(x, b) and _ball_evidence(x, b, n - 1, s)
    ]
    return _max_disjoint(found) >= need


def check_ball_n_proper_budgeted(S: StagedSet, ball: Ball, n: int, s: int) -> bool:
    """Budget-``s`` evidence that ``ball`` holds an ``n``-proper point.

    ``n = 1``: the stage-``s`` set has at least ``max(s, 1)`` components
    meeting the ball. ``n > 1``: at least ``max(s, 1)`` pairwise formally
    disjoint grid balls (centres on ``2^-s``, radii ``2^-j`` for ``j <= s``),
    formally enclosed in ``ball``, each carry evidence at level ``n - 1``.
    Exact about the stage-``s`` set; only a heuristic about the limit, and
    not monotone in ``s``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return _ball_evidence(S(s), ball, n, s)


def distance_right_ce(S: StagedSet, x: Dyadic, s: int) -> list[Dyadic | float]:
    """Upper approximations ``g(0), ..., g(s)`` of the distance from ``x`` to
    the other components.

    ``g(t)`` is the least stage distance seen up to stage ``t`` (``inf`` before
    ``x`` is enumerated), so the sequence never increases. For a computably
    compact set it converges to the true distance from above. For a merely
    c.e. closed set later stages may merge components, so the limit can be
    wrong; e.g. for G with every gap closing, ``x = 1/2`` gives ``g(t) = 1/2``
    (the distance to the point 1) at every stage although the limit set is
    the single interval ``[0, 1]``.
    """
    x = dyadic(x)
    out: list[Dyadic | float] = []
    best: Dyadic | float = INFINITY
    seen = False
    for t in range(s + 1):
        stage = S(t)
        if x in stage:
            seen = True
            best = min(best, distance_to_other_components(stage, x))
        out.append(best)
    if not seen:
        raise ValueError(f"{x} is never enumerated up to stage {s}")
    return out
