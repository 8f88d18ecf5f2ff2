from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from arcstack.errors import ResourceError, Unsupported
from arcstack.numbers import (QuadNum, as_rat, check_budget, fmt_rat, parse_rat,
                              q_independent, solve_in_span, sqrt_lower, sqrt_upper)

rats = st.fractions(min_value=-50, max_value=50, max_denominator=30)
SQ2 = QuadNum(0, 1, 2)


def test_sqrt2_times_nine_rounds_to_13():
    assert (SQ2 * 9).round() == 13
    assert (SQ2 * 9).floor() == 12


def test_floats_rejected():
    with pytest.raises(TypeError):
        as_rat(0.5)


def test_fmt_parse_roundtrip():
    assert fmt_rat(F(-3, 4)) == "-3/4"
    assert fmt_rat(F(5)) == "5/1"
    assert parse_rat("7/21") == F(1, 3)


def test_mixed_radicals_unsupported():
    with pytest.raises(Unsupported):
        QuadNum(0, 1, 2) + QuadNum(0, 1, 3)
    with pytest.raises(Unsupported):
        QuadNum(0, 1, 4)


def test_independence_examples():
    assert q_independent([QuadNum(1), SQ2])
    assert not q_independent([SQ2, SQ2 * 2])
    assert q_independent([QuadNum(1, 1, 2), QuadNum(3, -1, 2)])
    assert not q_independent([QuadNum(1), QuadNum(2), SQ2])


def test_solve_in_span():
    r = solve_in_span([QuadNum(1), SQ2], QuadNum(F(1, 2), 3, 2))
    assert r == [F(1, 2), 3]
    assert solve_in_span([QuadNum(1)], SQ2) is None


def test_sqrt_bounds_bracket():
    for x in (2, 3, F(9, 4), 10 ** 6 + 1):
        lo, hi = sqrt_lower(x), sqrt_upper(x)
        assert lo * lo <= x <= hi * hi


def test_bit_budget(monkeypatch):
    monkeypatch.setenv("ARCSTACK_MAX_BIGINT_BITS", "16")
    assert check_budget(F(1000, 3)) == F(1000, 3)
    with pytest.raises(ResourceError):
        check_budget(F(2 ** 40))


@given(rats, rats, rats, rats)
def test_field_identities(a, b, c, e):
    x, y = QuadNum(a, b, 2), QuadNum(c, e, 2)
    assert x + y - y == x
    assert (x * y) == (y * x)
    if y:
        assert (x / y) * y == x


@given(rats, rats)
def test_sign_matches_enclosure(a, b):
    x = QuadNum(a, b, 2)
    lo, hi = x.enclosure(80)
    assert lo <= hi
    if x.sign() > 0:
        assert hi > 0
    elif x.sign() < 0:
        assert lo < 0
    else:
        assert lo == hi == 0


@given(rats, rats.filter(lambda v: v != 0))
def test_round_is_nearest(a, b):
    x = QuadNum(a, b, 3)
    r = x.round()
    assert abs(x - r) <= F(1, 2)
