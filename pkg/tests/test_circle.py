from fractions import Fraction as F

import pytest
from hypothesis import assume, given, strategies as st

from arcstack.circle import (FULL, Arc, ArcFunction, int_scale, lin_comb, minkowski, refines,
                             scale_arcfn)


def test_int_scale_examples():
    a = Arc(F(3, 10), F(7, 10))
    assert int_scale(1, a) == a
    assert int_scale(3, a) is FULL
    assert int_scale(2, Arc(F(1, 8), F(3, 8))) == Arc(F(1, 4), F(3, 4))


def test_lin_comb_examples():
    a = Arc.centered(F(1, 4), F(1, 10))
    b = Arc.centered(F(1, 3), F(1, 20))
    s = lin_comb([(1, a), (2, b)])
    assert s.center == F(11, 12) and s.length == F(1, 5)
    assert lin_comb([(5, b)]) == int_scale(5, b)
    d = lin_comb([(1, a), (-1, a)])
    assert d.center == 0 and d.length == 2 * a.length


def test_empty_sums():
    assert minkowski([]) == (0, 0)
    with pytest.raises(ValueError):
        lin_comb([])


def test_refines_examples():
    phi = ArcFunction({0: Arc.centered(F(1, 2), F(1, 3))})
    assert refines(phi, phi)
    assert refines(ArcFunction({0: Arc.centered(F(1, 2), F(1, 4))}), phi)
    shrunk = ArcFunction({0: Arc.centered(F(1, 2), F(1, 3) - F(1, 1000))})
    assert not refines(phi, shrunk)


def test_scale_arcfn_examples():
    phi = ArcFunction({0: Arc(F(1, 8), F(3, 8))})
    assert scale_arcfn(1, phi) == phi
    assert scale_arcfn(2, phi) == ArcFunction({0: Arc(F(1, 4), F(3, 4))})
    assert len(scale_arcfn(2, ArcFunction({0: Arc.centered(0, F(3, 5))}))) == 0


def test_full_length_one_arc_is_not_full():
    a = Arc.centered(0, 1)
    assert not a.full and not a.contains(F(1, 2)) and a.contains(F(1, 4))


def test_json_roundtrip():
    a = Arc(F(-1, 7), F(2, 9))
    assert a.to_json() == f"lo={a.lo.numerator}/{a.lo.denominator} hi={a.hi.numerator}/{a.hi.denominator}"
    assert Arc.from_json(a.to_json()) == a
    assert Arc.from_json("FULL") is FULL


pts = st.fractions(min_value=0, max_value=1, max_denominator=60)
lens = st.fractions(min_value=F(1, 200), max_value=F(1, 2), max_denominator=200)
arcs = st.builds(Arc.centered, pts, lens)
ints = st.integers(-6, 6).filter(bool)


@given(st.lists(st.tuples(ints, arcs), min_size=1, max_size=4))
def test_lin_comb_length_law(terms):
    s = lin_comb(terms)
    total = sum(abs(k) * a.length for k, a in terms)
    if total > 1:
        assert s.full
    else:
        assert s.length == total


@given(st.lists(st.tuples(ints, arcs), min_size=1, max_size=3), st.lists(pts, min_size=3, max_size=3))
def test_lin_comb_contains_combinations(terms, ts):
    # pick points inside each arc and check their combination lands in the sum
    s = lin_comb(terms)
    x = sum(k * (a.lo + a.length * (t * F(9, 10) + F(1, 20))) for (k, a), t in zip(terms, ts))
    assert s.contains(x)


@given(arcs, arcs, arcs)
def test_subset_transitive(a, b, c):
    if a.subset_of(b) and b.subset_of(c):
        assert a.subset_of(c)


@given(arcs, ints)
def test_scaling_preserves_containment(a, k):
    inner = Arc.centered(a.center, a.length / 3)
    assert int_scale(k, inner).subset_of(int_scale(k, a))


@given(arcs, arcs)
def test_disjoint_closures_have_no_common_point(a, b):
    assume(a.closures_disjoint(b))
    for t in range(11):
        x = a.lo + a.length * F(t, 10)
        assert not b.closure_contains(x)
