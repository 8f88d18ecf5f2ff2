"""Arc equations and the exact n-solution checker."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .circle import ArcFunction, first_unrefined, lin_comb, scale_arcfn
from .vectors import FinSuppVec


@dataclass
class ArcEquation:
    """(phi, A, family, S, U).

    ``family`` maps a name to a sampled sequence {n: FinSuppVec} with integer
    entries; ``U`` maps the same names to target arcs.  ``S`` may be an int or
    a callable n -> int (the stack equations scale by K_n).
    """

    phi: ArcFunction
    A: tuple
    family: dict
    S: object
    U: dict
    names: list = field(default=None)

    def __post_init__(self):
        self.A = tuple(sorted(self.A))
        if self.names is None:
            self.names = list(self.family)
        missing = [f for f in self.names if f not in self.U]
        if missing:
            raise ValueError(f"no target arc for {missing}")

    def scale_at(self, n) -> int:
        S = self.S(n) if callable(self.S) else self.S
        if S < 1:
            raise ValueError("S must be a positive integer")
        return S


@dataclass(frozen=True)
class Verdict:
    ok: bool
    witness: tuple = None

    def __bool__(self):
        return self.ok


def sum_arc(vec: FinSuppVec, psi: ArcFunction):
    """sum_mu vec(mu) * psi(mu) as an Arc, or None for the empty sum (the point 0)."""
    terms = [(vec[mu], psi[mu]) for mu in vec]
    if not terms:
        return None
    return lin_comb(terms)


def check_refine(eq: ArcEquation, n, psi: ArcFunction) -> Verdict:
    bad = first_unrefined(scale_arcfn(eq.scale_at(n), psi), eq.phi)
    return Verdict(True) if bad is None else Verdict(False, ("refine", bad))


def check_sums(eq: ArcEquation, n, psi: ArcFunction) -> Verdict:
    for name in eq.names:
        vec = eq.family[name][n]
        if not vec.is_integral():
            raise ValueError(f"{name}({n}) is not integer valued")
        target = eq.U[name]
        s = sum_arc(vec, psi)
        ok = target.contains(0) if s is None else s.subset_of(target)
        if not ok:
            return Verdict(False, ("sum", name))
    return Verdict(True)


def check_solution(eq: ArcEquation, n, psi: ArcFunction) -> Verdict:
    """Is psi an n-solution of eq?  On failure the witness names the clause."""
    if n not in eq.A:
        raise ValueError(f"{n} is not a level of this equation")
    v = check_refine(eq, n, psi)
    if not v:
        return v
    return check_sums(eq, n, psi)


MIXED = "mixed"


def solution_length(psi: ArcFunction):
    """Common length of the support arcs, "mixed", or 1 for the empty support."""
    lengths = {a.length for _, a in psi.items()}
    if not lengths:
        return Fraction(1)
    if len(lengths) > 1:
        return MIXED
    return lengths.pop()
