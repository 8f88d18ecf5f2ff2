"""Construction of a rational stack and its basis data from a finite family.

Every element handled here is a symbolic :class:`SeqSpec` together with a
provenance vector expressing it as a rational combination of the input
family (plus the constant sequences chi[nu] that get adjoined).  Window
choices are delegated to a :class:`FilterOracle`; eventual properties
(limits, ratio limits, boundedness) are read off the value laws.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, lcm

from . import linalg
from .errors import DependenceDetected, HorizonExhausted, InternalAssertion
from .numbers import QuadNum, q_independent, solve_in_span
from .oracle import FilterOracle
from .stack_model import (FAIL, Member, RationalStack, StackBasisData, first_failure,
                          report_ok, validate_stack)
from .vectors import ConstPath, InjPath, Law, SeqSpec, ratio_limit


def chi_name(nu):
    return f"chi[{nu}]"


@dataclass(eq=False)
class Elem:
    """A symbolic sequence with its provenance over the family A."""

    name: str
    spec: SeqSpec
    prov: dict

    def law(self, path) -> Law:
        return self.spec.law_on(path)

    def at(self, path, n) -> Fraction:
        return self.spec.law_on(path).value(n)

    def minus(self, terms, name):
        spec, prov = self.spec, dict(self.prov)
        for r, e in terms:
            if r == 0:
                continue
            spec = spec - e.spec.scale(r)
            for k, v in e.prov.items():
                prov[k] = prov.get(k, Fraction(0)) - r * v
        return Elem(name, spec, {k: v for k, v in prov.items() if v != 0})

    def __repr__(self):
        return f"Elem({self.name})"


def chi_elem(nu):
    return Elem(chi_name(nu), SeqSpec.const_unit(nu), {chi_name(nu): Fraction(1)})


def _sgn(x):
    return (x > 0) - (x < 0)


# ---------------------------------------------------------------- Case A

def refine_case_a(oracle: FilterOracle, A, G, zeta, nus=()):
    """Refine A so the family is homogeneous along zeta; return (A, H).

    Support membership at zeta(n) is made constant per element, values at
    zeta(n) become constant or strictly monotone, magnitude comparisons are
    made constant, and zeta(n) avoids the constant coordinates in ``nus``.
    """
    if isinstance(zeta, InjPath) and nus:
        A = oracle.restrict(A, lambda n: zeta.index(n) not in nus, "avoid-nu")
    A = oracle.refine_partition(A, lambda n: tuple(e.at(zeta, n) != 0 for e in G), "support")
    H = [e for e in G if e.at(zeta, A[0]) != 0]
    for e in H:
        for nu in nus:
            law = e.law(ConstPath(nu))
            if not law.is_zero():
                A = oracle.restrict(A, lambda n, law=law: law.value(n) == 0, "nu-free")
    for e in H:
        A = oracle.refine_order(A, lambda n, e=e: e.at(zeta, n), "monotone")
    for a_idx, e in enumerate(H):
        for f in H[a_idx + 1:]:
            A = oracle.refine_partition(
                A, lambda n, e=e, f=f: _sgn(abs(e.at(zeta, n)) - abs(f.at(zeta, n))), "trichotomy")
    return A, H


# ---------------------------------------------------------------- Case A2

@dataclass
class CaseA2:
    basis: list
    sigma: dict       # Elem -> Elem
    theta: dict       # Elem -> QuadNum


def extract_basis_case_a2(H, zeta, gsharp, name_of=None) -> CaseA2:
    """Greedy Q-independent basis of the ratio limits theta(g) = lim g/g#."""
    den = gsharp.law(zeta)
    theta = {}
    for e in H:
        lim = ratio_limit(e.law(zeta), den)
        if not isinstance(lim, QuadNum):
            raise ValueError(f"ratio {e.name}/{gsharp.name} is unbounded")
        theta[e] = lim
    basis = [gsharp]
    for e in H:
        if e is gsharp:
            continue
        if q_independent([theta[b] for b in basis] + [theta[e]]):
            basis.append(e)
    sigma = {}
    for e in H:
        if e in basis:
            continue
        r = solve_in_span([theta[b] for b in basis], theta[e])
        if r is None:
            raise InternalAssertion(f"theta({e.name}) outside the span of the basis")
        if not any(r):
            sigma[e] = e
            continue
        name = name_of(e) if name_of else f"sigma({e.name})"
        s = e.minus(list(zip(r, basis)), name)
        if s.spec.is_zero():
            raise DependenceDetected(f"{e.name} is a combination of the brick {[b.name for b in basis]}")
        sigma[e] = s
    return CaseA2(basis, sigma, theta)


# ---------------------------------------------------------------- aux lemma

def find_coordinate(G, oracle: FilterOracle, A):
    """Either ("const", mu, g, A) with g(n)(mu) one-to-one on A, or ("inj", A, {g: path})."""
    for e in G:
        for path in e.spec.paths():
            if isinstance(path, ConstPath):
                law = e.law(path)
                if set(law.exact) - {(Fraction(1), 0)} or law.rounded:
                    B = oracle.refine_injective(A, lambda n, law=law: law.value(n), "coordinate")
                    if len({law.value(n) for n in B[:2]}) == 2:
                        return ("const", path.mu, e, B)
    paths = {}
    for e in G:
        inj = [p for p in e.spec.paths() if isinstance(p, InjPath)]
        if not inj:
            raise DependenceDetected(
                f"{e.name} is a constant combination of unit sequences on the window")
        paths[e] = inj[0]
    return ("inj", tuple(A), paths)


# ---------------------------------------------------------------- brickline

@dataclass
class BricklineResult:
    G_rest: list
    layers: list
    A: tuple
    zeta: object

    @property
    def l(self):
        return len(self.layers)


def _growth(e, zeta):
    lead = e.law(zeta).lead()
    return lead[0] if lead else (Fraction(0), 0)


def brickline(oracle: FilterOracle, A, nus, G, zeta, log=None, counter=None) -> BricklineResult:
    const = isinstance(zeta, ConstPath)
    chi = chi_elem(zeta.mu) if const else None
    Gj = list(G) + ([chi] if const else [])
    layers = []
    while True:
        if len(layers) > len(Gj) + len(G) + 1:
            raise InternalAssertion("brickline produced more layers than elements")
        if not any(not e.law(zeta).is_zero() for e in Gj):
            break
        A, H = refine_case_a(oracle, A, Gj, zeta, nus)
        if not H:
            break
        if chi is not None and chi in H and all(e.law(zeta).bounded() for e in H):
            gsharp = chi
        else:
            top = max(_growth(e, zeta) for e in H)
            gsharp = next(e for e in H if _growth(e, zeta) == top)

        def name_of(e):
            counter[0] += 1
            return f"#{counter[0]}"
        res = extract_basis_case_a2(H, zeta, gsharp, name_of if counter else None)
        layers.append(res.basis)
        Gj = [e for e in Gj if e not in H] + [res.sigma[e] for e in H if e in res.sigma]
    # cross-layer ratios: make them monotone on the window
    for j in range(len(layers)):
        for j2 in range(j):
            for h in layers[j]:
                for h2 in layers[j2]:
                    A = oracle.refine_order(
                        A, lambda n, h=h, h2=h2: h.at(zeta, n) / h2.at(zeta, n), "cross-ratio")
    if not layers:
        raise InternalAssertion("brickline called with no element supported on zeta")
    if log is not None:
        log.append({"zeta": zeta.to_json(), "G": len(G), "G_rest": len(Gj), "l": len(layers)})
    if len(Gj) >= len(G):
        raise InternalAssertion(f"brickline did not shrink the family ({len(G)} -> {len(Gj)})")
    return BricklineResult(Gj, layers, tuple(A), zeta)


# ---------------------------------------------------------------- build

@dataclass
class BuildResult:
    stack: RationalStack
    basis: StackBasisData
    log: list = field(default_factory=list)
    report: dict = None


def _K_table(A, hat_specs, A_specs, T):
    K = {}
    prev = 1
    for n in A:
        fn = factorial(n)
        d = 1
        for spec in hat_specs:
            d = lcm(d, spec.eval(n).scale(fn).denominator())
        for spec in A_specs:
            d = lcm(d, spec.eval(n).scale(fn * T).denominator())
        base = fn * T * d
        k = base * (prev // base + 1) if base <= prev else base
        K[n] = k
        prev = k
    return K


def build_stack(G, B, oracle: FilterOracle, anchor=None) -> BuildResult:
    """G: list of (name, SeqSpec).  B: window of sample points."""
    names = [nm for nm, _ in G]
    if len(set(names)) != len(names):
        raise ValueError("duplicate family names")
    for nm, spec in G:
        if spec.is_zero():
            raise DependenceDetected(f"{nm} is the zero sequence")
    for a_idx, (nm, spec) in enumerate(G):
        for nm2, spec2 in G[a_idx + 1:]:
            if spec == spec2:
                raise DependenceDetected(f"{nm} and {nm2} coincide")
    A = tuple(B)
    log = []
    counter = [0]
    levels = []          # (path, layers)
    nus = []
    current = [Elem(nm, spec, {nm: Fraction(1)}) for nm, spec in G]

    if not current:
        if anchor is None:
            raise ValueError("an empty family needs an anchor coordinate")
        nus = [anchor]
        levels = [(ConstPath(anchor), [[chi_elem(anchor)]])]
    else:
        # constant coordinates carrying non-constant values
        while current:
            kind = find_coordinate(current, oracle, A)
            if kind[0] != "const":
                break
            _, mu, _, A = kind
            res = brickline(oracle, A, nus, current, ConstPath(mu), log, counter)
            nus.append(mu)
            levels.append((res.zeta, res.layers))
            current, A = res.G_rest, res.A
        # injective coordinates
        while current:
            _, A, paths = find_coordinate(current, oracle, A)
            zeta = paths[current[0]]
            res = brickline(oracle, A, nus, current, zeta, log, counter)
            levels.append((res.zeta, res.layers))
            current, A = res.G_rest, res.A
        if len(log) > max(1, len(G) ** 2):
            raise InternalAssertion(f"{len(log)} brickline calls for a family of {len(G)}")

    k0, k1 = len(nus), len(levels)
    A_names = names + [chi_name(nu) for nu in nus]
    A_specs = [spec for _, spec in G] + [SeqSpec.const_unit(nu) for nu in nus]
    hat = [(i, j, e) for i, (_, layers) in enumerate(levels)
           for j, layer in enumerate(layers) for e in layer]
    if len(hat) != len(A_names):
        raise DependenceDetected(f"{len(hat)} brick elements for a family of {len(A_names)}")
    R = [[e.prov.get(f, Fraction(0)) for f in A_names] for _, _, e in hat]
    try:
        Rinv = linalg.inverse(R)
    except ValueError:
        raise DependenceDetected("brick elements do not span the family") from None
    T = lcm(linalg.denominator_lcm(R), linalg.denominator_lcm(Rinv))
    M = [[int(T * Rinv[f][h]) for h in range(len(hat))] for f in range(len(A_names))]
    N = [[int(T * R[h][f]) for f in range(len(A_names))] for h in range(len(hat))]
    C_names = [e.name for _, _, e in hat]

    min_size = oracle.min_size
    while True:
        if len(A) < min_size:
            raise HorizonExhausted(f"stack window shrank below {min_size}")
        K = _K_table(A, [e.spec for _, _, e in hat], A_specs, T)
        bricks = {}
        C_tables = {}
        for i, j, e in hat:
            hv = {n: e.spec.eval(n).scale(Fraction(1, T)) for n in A}
            C_tables[e.name] = hv
            bricks.setdefault((i, j), []).append(
                Member(e.name, {n: hv[n].scale(K[n]) for n in A}, e.spec.scale(Fraction(1, T))))
        stack = RationalStack(
            A=A, k0=k0, k1=k1, l=[len(layers) for _, layers in levels], nu=list(nus),
            zeta=[{n: path.index(n) for n in A} for path, _ in levels], K=K, bricks=bricks,
            T=T, zeta_paths=[path for path, _ in levels])
        rep = validate_stack(stack)
        if report_ok(rep):
            break
        cond, chk = first_failure(rep)
        if chk.status != FAIL or cond not in ("v", "vii", "ix", "x", "xi"):
            raise InternalAssertion(f"built stack fails condition {cond}: {chk.witness}", rep)
        A = A[1:]
    A_tables = {nm: {n: spec.eval(n) for n in A} for nm, spec in zip(A_names, A_specs)}
    basis = StackBasisData(A_names=A_names, A_tables=A_tables, C_names=C_names,
                           C_tables=C_tables, M=M, N=N, T=T,
                           A_specs=dict(zip(A_names, A_specs)))
    return BuildResult(stack, basis, log, rep)
