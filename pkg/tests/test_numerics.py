from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cantor_forge.numerics import (
    INFINITY,
    Dyadic,
    dyadic,
    dyadic_add,
    dyadic_affine,
    format_extended,
    parse_extended,
    pow2,
)

from .strategies import as_fraction, dyadics


def test_add_examples():
    assert dyadic_add(dyadic("1/2"), dyadic("1/4")) == dyadic("3/4")
    x = dyadic("5/8")
    assert dyadic_add(x, Dyadic(0)) == x
    assert 1 - pow2(-3) + pow2(-5) == dyadic("29/32")


def test_affine_examples():
    offset = 1 - pow2(-2) + pow2(-5)
    assert dyadic_affine(Dyadic(1), pow2(-4), offset) == dyadic("27/32")
    assert dyadic_affine(Dyadic(2), Dyadic(-1), Dyadic(3)) == 1
    b = dyadic("-3/16")
    assert dyadic_affine(Dyadic(0), pow2(-7), b) == b


def test_canonical_form():
    x = Dyadic(12, 5)
    assert (x.mantissa, x.exponent) == (3, 3)
    assert Dyadic(0, 9) == Dyadic(0) and Dyadic(0, 9).exponent == 0
    assert Dyadic(3, -2) == 12
    assert str(Dyadic(5, 3)) == "5/2^3"
    assert str(Dyadic(-7)) == "-7"


def test_parse_forms():
    assert dyadic("13/2^4") == Dyadic(13, 4)
    assert dyadic("3/8") == Dyadic(3, 3)
    assert dyadic(" -4 ") == -4
    for bad in ("1/3", "x", "2^3", ""):
        with pytest.raises(ValueError):
            dyadic(bad)


def test_extended_text():
    assert format_extended(INFINITY) == "inf"
    assert parse_extended("inf") == math.inf
    assert parse_extended("5/2^4") == Dyadic(5, 4)


def test_compares_with_infinity():
    x = Dyadic(1 << 40)
    assert x < INFINITY and not x > INFINITY
    assert min(INFINITY, x) == x


def test_reciprocal_and_log():
    assert pow2(-5).reciprocal() == 32
    assert Dyadic(-1, 3).reciprocal() == -8
    with pytest.raises(ZeroDivisionError):
        Dyadic(3).reciprocal()
    assert dyadic("3/16").log2_floor() == -3
    assert Dyadic(1).log2_floor() == 0


@given(dyadics(), dyadics())
def test_arithmetic_matches_fractions(a, b):
    fa, fb = as_fraction(a), as_fraction(b)
    assert as_fraction(a + b) == fa + fb
    assert as_fraction(a - b) == fa - fb
    assert as_fraction(a * b) == fa * fb
    assert (a < b) == (fa < fb)
    assert (a == b) == (fa == fb)


@given(dyadics())
def test_text_round_trip(x):
    assert Dyadic.parse(str(x)) == x
    assert Dyadic.from_fraction(x.to_fraction()) == x


@given(dyadics(), st.integers(-20, 20))
def test_shift_is_power_of_two_scaling(x, k):
    assert as_fraction(x.shift(k)) == as_fraction(x) * Fraction(2) ** k


@given(dyadics(), dyadics())
def test_equal_values_hash_equal(a, b):
    if a == b:
        assert hash(a) == hash(b)
    if a.exponent == 0:
        assert hash(a) == hash(a.mantissa)


@given(dyadics().filter(lambda d: d != 0))
def test_log2_floor_brackets(x):
    k = x.log2_floor()
    assert pow2(k) <= abs(x) < pow2(k + 1)
