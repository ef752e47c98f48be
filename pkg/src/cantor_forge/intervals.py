"""Finite unions of closed dyadic intervals and open dyadic balls.

An :class:`IntervalSet` is the stage-level snapshot of a c.e. closed subset
of the line: sorted, pairwise disjoint closed intervals with a positive gap
between neighbours, so each stored interval is exactly one connected
component. Touching intervals are merged on normalization.

Balls are open. For a finite interval union every clopen subset is a union of
components, which is what makes the clopen counting below exact.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .numerics import INFINITY, ZERO, Dyadic, dyadic

__all__ = [
    "Ball",
    "Interval",
    "IntervalSet",
    "affine_image",
    "ball_formally_disjoint",
    "ball_formally_enclosed",
    "components_intersecting",
    "count_disjoint_clopen_intersecting",
    "distance_to_other_components",
    "enumerate_clopen_decompositions",
    "hausdorff_distance",
    "normalize",
    "union",
]


@dataclass(frozen=True, order=True)
class Interval:
    lo: Dyadic
    hi: Dyadic

    def __post_init__(self) -> None:
        if not isinstance(self.lo, Dyadic):
            object.__setattr__(self, "lo", dyadic(self.lo))
        if not isinstance(self.hi, Dyadic):
            object.__setattr__(self, "hi", dyadic(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"malformed interval [{self.lo}, {self.hi}]")

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def length(self) -> Dyadic:
        return self.hi - self.lo

    def __contains__(self, x: Dyadic) -> bool:
        return self.lo <= x <= self.hi

    def distance_to(self, x: Dyadic) -> Dyadic:
        if x < self.lo:
            return self.lo - x
        if x > self.hi:
            return x - self.hi
        return ZERO

    def meets_ball(self, ball: "Ball") -> bool:
        # closed [lo, hi] against open (c - r, c + r)
        return self.lo < ball.center + ball.radius and self.hi > ball.center - ball.radius

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


@dataclass(frozen=True)
class Ball:
    """Open ball ``(center - radius, center + radius)``."""

    center: Dyadic
    radius: Dyadic

    def __post_init__(self) -> None:
        if not isinstance(self.center, Dyadic):
            object.__setattr__(self, "center", dyadic(self.center))
        if not isinstance(self.radius, Dyadic):
            object.__setattr__(self, "radius", dyadic(self.radius))
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")

    def __contains__(self, x: Dyadic) -> bool:
        return abs(x - self.center) < self.radius


class IntervalSet:
    """Normalized finite union of closed intervals (possibly empty)."""

    __slots__ = ("_intervals", "_los")

    def __init__(self, intervals: Iterable[Interval] = ()) -> None:
        merged = _merge(intervals)
        self._intervals: tuple[Interval, ...] = tuple(merged)
        self._los = [iv.lo for iv in self._intervals]

    @property
    def intervals(self) -> tuple[Interval, ...]:
        return self._intervals

    def __iter__(self) -> Iterator[Interval]:
        return iter(self._intervals)

    def __len__(self) -> int:
        return len(self._intervals)

    def __bool__(self) -> bool:
        return bool(self._intervals)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return self._intervals == other._intervals

    def __hash__(self) -> int:
        return hash(self._intervals)

    def __repr__(self) -> str:
        return "IntervalSet{" + ", ".join(map(str, self._intervals)) + "}"

    def component_of(self, x: Dyadic) -> int | None:
        """Index of the component containing ``x``, or ``None``."""
        i = bisect.bisect_right(self._los, x) - 1
        if i >= 0 and x <= self._intervals[i].hi:
            return i
        return None

    def __contains__(self, x: Dyadic) -> bool:
        return self.component_of(x) is not None

    def contains_set(self, other: "IntervalSet") -> bool:
        for iv in other:
            i = self.component_of(iv.lo)
            if i is None or iv.hi > self._intervals[i].hi:
                return False
        return True

    def measure(self) -> Dyadic:
        return sum((iv.length for iv in self._intervals), ZERO)

    def distance_to(self, x: Dyadic) -> Dyadic | float:
        if not self._intervals:
            return INFINITY
        i = bisect.bisect_right(self._los, x)
        best: Dyadic | float = INFINITY
        for j in (i - 1, i):
            if 0 <= j < len(self._intervals):
                best = min(best, self._intervals[j].distance_to(x))
        return best

    @property
    def hull(self) -> Interval | None:
        if not self._intervals:
            return None
        return Interval(self._intervals[0].lo, self._intervals[-1].hi)

    # json ---------------------------------------------------------------

    def to_json(self) -> dict:
        return {"intervals": [[str(iv.lo), str(iv.hi)] for iv in self._intervals]}

    @classmethod
    def from_json(cls, payload: dict) -> "IntervalSet":
        try:
            pairs = payload["intervals"]
            return cls(Interval(dyadic(lo), dyadic(hi)) for lo, hi in pairs)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"bad interval-set payload: {exc}") from exc


def _merge(raw: Iterable[Interval]) -> list[Interval]:
    items = sorted(raw, key=lambda iv: (iv.lo, iv.hi))
    out: list[Interval] = []
    for iv in items:
        if out and iv.lo <= out[-1].hi:
            if iv.hi > out[-1].hi:
                out[-1] = Interval(out[-1].lo, iv.hi)
        else:
            out.append(iv)
    return out


def normalize(raw: Sequence[Interval]) -> IntervalSet:
    """Merge overlapping and touching intervals into components."""
    return IntervalSet(raw)


def union(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    return IntervalSet((*a.intervals, *b.intervals))


def affine_image(s: IntervalSet, scale: Dyadic, offset: Dyadic) -> IntervalSet:
    """Image under ``x -> scale * x + offset``; negative scale reflects."""
    if scale == 0:
        raise ValueError("affine scale must be nonzero")
    images = []
    for iv in s:
        a, b = scale * iv.lo + offset, scale * iv.hi + offset
        images.append(Interval(a, b) if a <= b else Interval(b, a))
    return IntervalSet(images)


def components_intersecting(s: IntervalSet, ball: Ball) -> list[Interval]:
    lo = ball.center - ball.radius
    hi = ball.center + ball.radius
    # first component whose hi could exceed lo
    start = max(bisect.bisect_left(s._los, lo) - 1, 0)
    hits = []
    for iv in s.intervals[start:]:
        if iv.lo >= hi:
            break
        if iv.meets_ball(ball):
            hits.append(iv)
    return hits


def count_disjoint_clopen_intersecting(s: IntervalSet, ball: Ball) -> int:
    """Largest number of pairwise disjoint clopen subsets of ``s`` meeting ``ball``.

    Clopen subsets of a finite interval union are unions of components, and
    a component is connected, so the maximum is attained by singletons.
    """
    return len(components_intersecting(s, ball))


def enumerate_clopen_decompositions(
    s: IntervalSet, max_parts: int
) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Yield every partition of the component indices into at most
    ``max_parts`` nonempty groups.

    Order is lexicographic in the restricted-growth string: component ``i``
    goes to group ``g[i]`` with ``g[0] = 0`` and ``g[i] <= max(g[:i]) + 1``.
    """
    n = len(s)
    if n == 0 or max_parts < 1:
        return

    def grow(prefix: list[int], top: int) -> Iterator[list[int]]:
        if len(prefix) == n:
            yield prefix
            return
        for g in range(min(top + 2, max_parts)):
            prefix.append(g)
            yield from grow(prefix, max(top, g))
            prefix.pop()

    for rgs in grow([0], 0):
        groups: list[list[int]] = [[] for _ in range(max(rgs) + 1)]
        for idx, g in enumerate(rgs):
            groups[g].append(idx)
        yield tuple(tuple(g) for g in groups)


def ball_formally_disjoint(a: Ball, b: Ball) -> bool:
    return abs(a.center - b.center) > a.radius + b.radius


def ball_formally_enclosed(inner: Ball, outer: Ball) -> bool:
    return abs(inner.center - outer.center) + inner.radius < outer.radius


def distance_to_other_components(s: IntervalSet, x: Dyadic) -> Dyadic | float:
    """Distance from ``x`` to the components of ``s`` not containing it.

    Returns :data:`INFINITY` when ``s`` is a single component.
    """
    i = s.component_of(x)
    if i is None:
        raise ValueError(f"{x} is not in the set")
    ivs = s.intervals
    best: Dyadic | float = INFINITY
    if i > 0:
        best = x - ivs[i - 1].hi
    if i + 1 < len(ivs):
        best = min(best, ivs[i + 1].lo - x)
    return best


def _directed_hausdorff(a: IntervalSet, b: IntervalSet) -> Dyadic:
    # d(., b) restricted to a is piecewise linear; its maximum sits at an
    # endpoint of a or at the midpoint of a gap of b lying inside a.
    best = ZERO
    candidates = [iv.lo for iv in a] + [iv.hi for iv in a]
    bivs = b.intervals
    for left, right in zip(bivs, bivs[1:]):
        mid = (left.hi + right.lo).shift(-1)
        if mid in a:
            candidates.append(mid)
    for x in candidates:
        best = max(best, b.distance_to(x))
    return best


def hausdorff_distance(a: IntervalSet, b: IntervalSet) -> Dyadic:
    if not a or not b:
        raise ValueError("Hausdorff distance needs nonempty sets")
    return max(_directed_hausdorff(a, b), _directed_hausdorff(b, a))
