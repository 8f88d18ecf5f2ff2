"""Rewrite an arc equation over the family A as one over the bricks.

Given target arcs U_f (f in A) of length delta, the brick targets W_h are
centered at z_h = sum_f N[h][f] y_f / T^2 with y_f the center of U_f.
Since M and N/T^2 are inverse matrices, sum_h M[f][h] W_h is centered at
y_f and has length eps * sum_h |M[f][h]| <= delta, hence lies in U_f.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .circle import Arc, ArcFunction, lin_comb
from .equations import ArcEquation
from .numbers import as_rat
from .stack_builder import chi_name


@dataclass
class TransformOutput:
    eps: Fraction
    W: dict            # C-name -> Arc
    psi: ArcFunction
    z: dict            # C-name -> rational center


def transform(basis, delta, U, rho: ArcFunction, nus) -> TransformOutput:
    delta = as_rat(delta)
    total = basis.m_abs_sum()
    eps = delta / total
    if not eps < 1:
        raise ValueError(f"eps = {eps} is not below 1")
    for f in basis.A_names:
        if U[f].full or U[f].length != delta:
            raise ValueError(f"target arc for {f} does not have length {delta}")
    for nu in nus:
        if nu not in rho.support():
            raise ValueError(f"constant coordinate {nu} outside the support of rho")
        if U[chi_name(nu)] != rho[nu]:
            raise ValueError(f"target arc for chi[{nu}] differs from rho({nu})")
    T2 = basis.T * basis.T
    y = {f: U[f].center for f in basis.A_names}
    z, W = {}, {}
    for hi, h in enumerate(basis.C_names):
        z[h] = sum((basis.N[hi][fi] * y[f] for fi, f in enumerate(basis.A_names)),
                   Fraction(0)) / T2
        W[h] = Arc.centered(z[h], eps)
    nu_set = set(nus)
    psi = ArcFunction({mu: Arc.centered(a.center, eps)
                       for mu, a in rho.items() if mu not in nu_set})
    return TransformOutput(eps, W, psi, z)


def star_containment(basis, out: TransformOutput, U):
    """First f with sum_h M[f][h] W_h not inside U_f, or None."""
    for fi, f in enumerate(basis.A_names):
        terms = [(basis.M[fi][hi], out.W[h]) for hi, h in enumerate(basis.C_names)
                 if basis.M[fi][hi]]
        if not lin_comb(terms).subset_of(U[f]):
            return f
    return None


def stack_equation(stack, basis, out: TransformOutput, A=None) -> ArcEquation:
    """(psi, A, K.C, K_n, W): the brick tables are the integer sequences."""
    members = {m.name: m for m in stack.members()}
    family = {h: members[h].table for h in basis.C_names}
    return ArcEquation(out.psi, A or stack.A, family, lambda n: stack.K[n], out.W,
                       names=list(basis.C_names))


def original_equation(stack, basis, rho: ArcFunction, U, A=None) -> ArcEquation:
    """(rho, A, K.A, K_n, U)."""
    family = {f: {n: basis.A_tables[f][n].scale(stack.K[n]) for n in stack.A}
              for f in basis.A_names}
    return ArcEquation(rho, A or stack.A, family, lambda n: stack.K[n], U,
                       names=list(basis.A_names))
