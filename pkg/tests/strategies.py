from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from cantor_forge.intervals import Ball, Interval, IntervalSet
from cantor_forge.numerics import Dyadic


def dyadics(max_exp: int = 12, bound: int = 1 << 14) -> st.SearchStrategy[Dyadic]:
    return st.builds(Dyadic, st.integers(-bound, bound), st.integers(0, max_exp))


def as_fraction(x: Dyadic) -> Fraction:
    return Fraction(x.mantissa, 1 << x.exponent)


@st.composite
def grid_sets(draw, grid: int = 4, max_components: int = 5) -> IntervalSet:
    n = draw(st.integers(1, max_components))
    ivs = []
    for _ in range(n):
        a = draw(st.integers(0, 1 << grid))
        b = draw(st.integers(a, 1 << grid))
        ivs.append(Interval(Dyadic(a, grid), Dyadic(b, grid)))
    return IntervalSet(ivs)


@st.composite
def grid_balls(draw, grid: int = 4) -> Ball:
    c = draw(st.integers(-4, (1 << grid) + 4))
    r = draw(st.integers(1, 1 << grid))
    return Ball(Dyadic(c, grid), Dyadic(r, grid))
