"""Solving the brick arc equation on one level n of a rational stack.

The solver walks the stack from the top level down.  Inside a level it
walks the bricks from the fastest-growing one down, each time shrinking an
arc Q with the subarc finder so that the level's coordinate x satisfies
every brick's target simultaneously.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .circle import FULL, Arc, ArcFunction, frac_part
from .equations import check_solution
from .errors import HorizonExhausted, InternalAssertion, LevelFailed, NotFound
from .kronecker import find_L, find_subarc
from .numbers import QuadNum, as_rat, sqrt_upper
from .transformer import stack_equation
from .vectors import ratio_limit


def eps_star_for(eps) -> Fraction:
    return min(Fraction(1, 8), as_rat(eps) / 8) * Fraction(7, 8)


@dataclass
class LevelPlan:
    stack: object
    basis: object
    eps: Fraction
    eps_star: Fraction
    eps_k: Fraction           # radius parameter handed to the subarc finder
    norm: Fraction            # rational upper bound of sqrt(|A| + 1)
    L: int
    D: frozenset
    order: dict               # (i, j) -> member names, magnitude decreasing
    theta: dict               # (i, j) -> tuple of QuadNum in `order`
    B: tuple
    gamma: dict
    rejected: dict = field(default_factory=dict)   # n -> first failed condition


def _brick_order(stack, i, j):
    brick = stack.bricks[(i, j)]
    n0 = stack.A[0]
    ordered = sorted(brick, key=lambda h: -abs(stack.value(i, h, n0)))
    for a, b in zip(ordered, ordered[1:]):
        if abs(stack.value(i, a, n0)) == abs(stack.value(i, b, n0)):
            raise LevelFailed(None, f"equal magnitudes in brick ({i},{j}): {a.name}, {b.name}")
    return ordered


def l1(vec) -> Fraction:
    return vec.l1()


def plan_levels(stack, basis, eps, D) -> LevelPlan:
    eps = as_rat(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    eps_star = eps_star_for(eps)
    eps_k = eps_star / 2
    n_a = len(basis.A_names)
    norm = sqrt_upper(n_a + 1)
    order, theta = {}, {}
    L = 1
    for (i, j) in stack.levels():
        ordered = _brick_order(stack, i, j)
        order[(i, j)] = [h.name for h in ordered]
        v_law = stack.law(i, ordered[0])
        ths = []
        for h in ordered:
            lim = ratio_limit(stack.law(i, h), v_law)
            if not isinstance(lim, QuadNum):
                raise ValueError(f"unbounded ratio inside brick ({i},{j})")
            ths.append(lim)
        theta[(i, j)] = tuple(ths)
        L = max(L, find_L(ths, eps_k).L)
    D = frozenset(D)
    members = {m.name: m for m in stack.members()}
    B, gamma, rejected = [], {}, {}
    a_bound = eps_k / (norm * L)
    for n in stack.A:
        why = None
        for (i, j) in stack.levels():
            names = order[(i, j)]
            v = stack.value(i, members[names[0]], n)
            for name, th in zip(names, theta[(i, j)]):
                if not abs(th - stack.value(i, members[name], n) / v) < a_bound:
                    why = ("a", i, j, name)
                    break
            if why:
                break
        if not why:
            for i in range(stack.k1):
                last = order[(i, stack.l[i] - 1)][0]
                if not 3 * L < eps_k * abs(stack.value(i, members[last], n)):
                    why = ("b", i)
                    break
                for j in range(1, stack.l[i]):
                    u_prev = abs(stack.value(i, members[order[(i, j - 1)][-1]], n))
                    v_j = abs(stack.value(i, members[order[(i, j)][0]], n))
                    if not 3 * L * norm * v_j <= 4 * eps_k * u_prev:
                        why = ("c", i, j)
                        break
                if why:
                    break
        if not why:
            for i in range(stack.k0, stack.k1):
                if stack.zeta[i][n] in D:
                    why = ("d", i)
                    break
        if why:
            rejected[n] = why
            continue
        B.append(n)
        biggest = max(max(l1(m.table[n]) for m in members.values()), Fraction(stack.K[n]))
        gamma[n] = eps_star / ((n_a + 1) * biggest)
    if not B:
        raise HorizonExhausted("no level satisfies the solver conditions",
                               {"rejected": {str(k): v for k, v in list(rejected.items())[-5:]}})
    return LevelPlan(stack, basis, eps, eps_star, eps_k, norm, L, D, order, theta,
                     tuple(B), gamma, rejected)


@dataclass
class LevelTrace:
    n: int
    x: dict                    # mu -> rational x_mu
    Q: dict                    # (i, j) -> Arc
    psi_star: ArcFunction


def solve_level(plan: LevelPlan, n, W, psi: ArcFunction, out=None):
    """An n-solution of (psi, B, K.C, K_n, W) of length gamma_n, with its trace."""
    stack = plan.stack
    if n not in plan.gamma:
        raise LevelFailed(n, "not a planned level")
    Kn = stack.K[n]
    members = {m.name: m for m in stack.members()}
    zetas = {stack.zeta[i][n] for i in range(stack.k1)}
    support = set(plan.D) | set(psi.support())
    for m in members.values():
        support |= set(m.table[n].support())
    support -= zetas
    psi_star = ArcFunction({mu: Arc.centered(psi[mu].center if mu in psi.support() else 0,
                                             plan.eps_star) for mu in support})
    x = {mu: frac_part(psi_star[mu].center) / Kn for mu in sorted(support)}
    V = {h: Arc.centered(W[h].center, 4 * plan.eps_star) for h in plan.basis.C_names}
    Q = {}
    for i in reversed(range(stack.k1)):
        z = stack.zeta[i][n]
        J = FULL
        for j in reversed(range(stack.l[i])):
            names = plan.order[(i, j)]
            a, centers = [], []
            for name in names:
                vec = members[name].table[n]
                shift = Fraction(0)
                for mu in vec:
                    if mu == z:
                        continue
                    if mu not in x:
                        raise InternalAssertion(
                            f"coordinate {mu} of {name} unresolved at level {i}", {"n": n})
                    shift += vec[mu] * x[mu]
                a.append(vec[z])
                centers.append(V[name].center - shift)
            try:
                J = find_subarc(a, J, centers, plan.eps_k, plan.L, plan.norm)
            except (NotFound, ValueError) as exc:
                raise LevelFailed(n, f"brick ({i},{j}): {exc}") from None
            Q[(i, j)] = J
        x[z] = J.center
    gamma = plan.gamma[n]
    phi = ArcFunction({mu: Arc.centered(xm, gamma) for mu, xm in x.items()})
    trace = LevelTrace(n, x, Q, psi_star)
    if out is not None:
        eq = stack_equation(stack, plan.basis, out, plan.B)
        verdict = check_solution(eq, n, phi)
        if not verdict:
            raise InternalAssertion(f"level {n} solution fails the checker: {verdict.witness}",
                                    trace)
    return phi, trace
