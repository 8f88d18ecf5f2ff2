from fractions import Fraction as F

from hypothesis import given, strategies as st

from arcstack.circle import Arc, ArcFunction
from arcstack.equations import MIXED, ArcEquation, check_solution, solution_length
from arcstack.vectors import FinSuppVec


def _eq(U):
    phi = ArcFunction({0: Arc(F(-1, 4), F(1, 4))})
    fam = {"f": {0: FinSuppVec({0: 2})}}
    return ArcEquation(phi, (0,), fam, 2, {"f": U})


PSI = ArcFunction({0: Arc(F(-1, 40), F(1, 40))})


def test_solution_accepted():
    assert check_solution(_eq(Arc(F(-1, 8), F(1, 8))), 0, PSI)


def test_sum_clause_witness():
    v = check_solution(_eq(Arc(0, F(1, 100))), 0, PSI)
    assert not v and v.witness == ("sum", "f")


def test_refine_clause_witness():
    wide = ArcFunction({0: Arc(F(-1, 5), F(1, 5))})
    v = check_solution(_eq(Arc(F(-1, 8), F(1, 8))), 0, wide)
    assert not v and v.witness == ("refine", 0)


def test_no_constraints():
    eq = ArcEquation(ArcFunction(), (0,), {}, 3, {})
    assert check_solution(eq, 0, ArcFunction({4: Arc.centered(0, F(1, 2))}))


def test_callable_scale():
    eq = _eq(Arc(F(-1, 8), F(1, 8)))
    eq.S = lambda n: 2
    assert check_solution(eq, 0, PSI)


def test_solution_length_cases():
    a, b = Arc.centered(0, F(1, 7)), Arc.centered(F(1, 2), F(1, 7))
    assert solution_length(ArcFunction({0: a, 1: b})) == F(1, 7)
    assert solution_length(ArcFunction({0: a, 1: Arc.centered(0, F(1, 8))})) == MIXED
    assert solution_length(ArcFunction()) == 1


cents = st.fractions(min_value=-F(1, 50), max_value=F(1, 50), max_denominator=500)
shrink = st.fractions(min_value=F(1, 10), max_value=1, max_denominator=20)


@given(cents, shrink)
def test_shrinking_a_solution_keeps_it(c, k):
    eq = _eq(Arc(F(-1, 8), F(1, 8)))
    psi = ArcFunction({0: Arc.centered(c, F(1, 40))})
    if check_solution(eq, 0, psi):
        smaller = ArcFunction({0: Arc.centered(c, F(1, 40) * k)})
        assert check_solution(eq, 0, smaller)
