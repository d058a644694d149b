from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kakeyalab.numeric import Dyadic, dyadic_floor, is_dyadic, parse_rat, rat_str, to_rat

rationals = st.fractions(min_value=-100, max_value=100, max_denominator=1 << 12)


def test_dyadic_floor_examples():
    assert dyadic_floor(Fraction(1, 2), 1) == Dyadic(1, 1)
    assert dyadic_floor(Fraction(1, 3), 2) == Dyadic(1, 2)
    assert dyadic_floor(Fraction(-3, 8), 1) == Dyadic(-1, 1)
    assert dyadic_floor(Fraction(0), 5) == Dyadic(0, 0)
    assert dyadic_floor(Fraction(7, 4), 0) == Dyadic(1, 0)


@given(rationals, st.integers(min_value=0, max_value=32))
def test_dyadic_floor_bracket(a, n):
    f = dyadic_floor(a, n).to_rat()
    assert f <= a < f + Fraction(1, 1 << n)
    assert (f * (1 << n)).denominator == 1


def test_canonical_form():
    assert Dyadic.make(4, 2) == Dyadic(1, 0)
    assert Dyadic.make(6, 3) == Dyadic(3, 2)
    assert Dyadic.make(0, 7) == Dyadic(0, 0)
    assert Dyadic.make(5, -2) == Dyadic(20, 0)
    with pytest.raises(ValueError):
        Dyadic(2, 1)
    with pytest.raises(ValueError):
        Dyadic(1, -1)


def test_from_rat_rejects_non_dyadic():
    assert Dyadic.from_rat(Fraction(3, 8)) == Dyadic(3, 3)
    with pytest.raises(ValueError):
        Dyadic.from_rat(Fraction(1, 3))
    assert is_dyadic(Fraction(5, 16))
    assert not is_dyadic(Fraction(1, 6))


@given(
    st.integers(min_value=-(1 << 20), max_value=1 << 20),
    st.integers(min_value=0, max_value=20),
    st.integers(min_value=-(1 << 20), max_value=1 << 20),
    st.integers(min_value=0, max_value=20),
)
def test_dyadic_ring_ops_match_fractions(m1, e1, m2, e2):
    a = Dyadic.make(m1, e1)
    b = Dyadic.make(m2, e2)
    assert (a + b).to_rat() == a.to_rat() + b.to_rat()
    assert (a - b).to_rat() == a.to_rat() - b.to_rat()
    assert (a * b).to_rat() == a.to_rat() * b.to_rat()
    assert (a < b) == (a.to_rat() < b.to_rat())


@given(st.integers(min_value=-(1 << 30), max_value=1 << 30), st.integers(min_value=0, max_value=40))
def test_dyadic_string_round_trip(m, e):
    d = Dyadic.make(m, e)
    assert Dyadic.parse(str(d)) == d


@given(rationals)
def test_rat_string_round_trip(a):
    assert parse_rat(rat_str(a)) == a


def test_to_rat():
    assert to_rat(Dyadic(-5, 3)) == Fraction(-5, 8)
