"""Rational stacks, their basis data, and the finite-horizon validator."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .errors import Unsupported
from .numbers import QuadNum, q_independent
from .vectors import FinSuppVec, POS_INF, NEG_INF, path_from_json, ratio_limit

PASS, FAIL, UNVERIFIED = "PASS", "FAIL", "UNVERIFIED"

CONDITIONS = ("i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "x", "xi",
              "divisibility", "K>=2", "integral")


@dataclass
class Member:
    """One brick element: integer table n -> FinSuppVec.

    ``spec`` is the symbolic pre-image (a SeqSpec) when known; the brick
    element equals K_n * spec(n) / T.
    """

    name: str
    table: dict
    spec: object = None


@dataclass
class RationalStack:
    A: tuple
    k0: int
    k1: int
    l: list
    nu: list
    zeta: list            # zeta[i] : dict n -> index
    K: dict               # n -> int
    bricks: dict          # (i, j) -> list[Member]
    T: int
    zeta_paths: list = field(default=None)

    def __post_init__(self):
        self.A = tuple(sorted(self.A))
        if self.zeta_paths is None:
            self.zeta_paths = [None] * self.k1

    def levels(self):
        return [(i, j) for i in range(self.k1) for j in range(self.l[i])]

    def members(self):
        return [m for key in self.levels() for m in self.bricks[key]]

    def value(self, i, member, n) -> Fraction:
        return member.table[n][self.zeta[i][n]]

    def law(self, i, member):
        """Value law of member.spec along zeta_i, or None when unknown."""
        path = self.zeta_paths[i]
        if member.spec is None or path is None:
            return None
        return member.spec.law_on(path)

    def to_json(self):
        return {
            "A": list(self.A), "k0": self.k0, "k1": self.k1, "l": list(self.l),
            "nu": list(self.nu), "T": self.T,
            "zeta": [{str(n): z[n] for n in self.A} for z in self.zeta],
            "K": {str(n): str(self.K[n]) for n in self.A},
            "bricks": [{"i": i, "j": j, "members": [
                {"name": m.name, "table": {str(n): m.table[n].to_json() for n in self.A}}
                for m in self.bricks[(i, j)]]} for (i, j) in self.levels()],
            "zeta_paths": [None if p is None else p.to_json() for p in self.zeta_paths],
        }

    @classmethod
    def from_json(cls, obj):
        A = tuple(obj["A"])
        bricks = {}
        for b in obj["bricks"]:
            bricks[(b["i"], b["j"])] = [
                Member(m["name"], {int(n): FinSuppVec.from_json(v) for n, v in m["table"].items()})
                for m in b["members"]]
        return cls(A=A, k0=obj["k0"], k1=obj["k1"], l=list(obj["l"]), nu=list(obj["nu"]),
                   zeta=[{int(n): v for n, v in z.items()} for z in obj["zeta"]],
                   K={int(n): int(v) for n, v in obj["K"].items()}, bricks=bricks, T=obj["T"],
                   zeta_paths=[None if p is None else path_from_json(p)
                               for p in obj.get("zeta_paths", [None] * obj["k1"])])


@dataclass
class StackBasisData:
    """Family A (names/tables), family C = bricks / K, and the matrices M, N."""

    A_names: list
    A_tables: dict        # name -> {n: FinSuppVec}
    C_names: list
    C_tables: dict        # name -> {n: FinSuppVec} (rational)
    M: list               # rows A_names, cols C_names
    N: list               # rows C_names, cols A_names
    T: int
    A_specs: dict = field(default_factory=dict)

    def m_abs_sum(self) -> int:
        return sum(abs(x) for row in self.M for x in row)

    def to_json(self):
        def tables(names, tabs):
            return {nm: {str(n): v.to_json() for n, v in sorted(tabs[nm].items())} for nm in names}
        return {"A_names": self.A_names, "C_names": self.C_names, "T": self.T,
                "M": [[str(x) for x in row] for row in self.M],
                "N": [[str(x) for x in row] for row in self.N],
                "A_tables": tables(self.A_names, self.A_tables),
                "C_tables": tables(self.C_names, self.C_tables)}

    @classmethod
    def from_json(cls, obj):
        def tables(tabs):
            return {nm: {int(n): FinSuppVec.from_json(v) for n, v in t.items()}
                    for nm, t in tabs.items()}
        return cls(A_names=obj["A_names"], A_tables=tables(obj["A_tables"]),
                   C_names=obj["C_names"], C_tables=tables(obj["C_tables"]),
                   M=[[int(x) for x in row] for row in obj["M"]],
                   N=[[int(x) for x in row] for row in obj["N"]], T=obj["T"])


def check_basis(stack: RationalStack, basis: StackBasisData):
    """Exact matrix identities and integrality; returns the first failure or None."""
    T2 = basis.T * basis.T
    for n in stack.A:
        for fi, f in enumerate(basis.A_names):
            acc = FinSuppVec()
            for hi, h in enumerate(basis.C_names):
                if basis.M[fi][hi]:
                    acc = acc + basis.C_tables[h][n].scale(basis.M[fi][hi])
            if acc != basis.A_tables[f][n]:
                return ("f = sum M h", f, n)
            if not basis.A_tables[f][n].scale(stack.K[n]).is_integral():
                return ("K A integral", f, n)
        for hi, h in enumerate(basis.C_names):
            acc = FinSuppVec()
            for fi, f in enumerate(basis.A_names):
                if basis.N[hi][fi]:
                    acc = acc + basis.A_tables[f][n].scale(Fraction(basis.N[hi][fi], T2))
            if acc != basis.C_tables[h][n]:
                return ("h = N f / T^2", h, n)
            if not basis.C_tables[h][n].scale(stack.K[n]).is_integral():
                return ("K C integral", h, n)
    members = {m.name: m for m in stack.members()}
    for h in basis.C_names:
        for n in stack.A:
            if basis.C_tables[h][n].scale(stack.K[n]) != members[h].table[n]:
                return ("brick = K h", h, n)
    return None


# ---------------------------------------------------------------- validator

def _monotone(vals):
    pairs = list(zip(vals, vals[1:]))
    return all(a <= b for a, b in pairs) or all(a >= b for a, b in pairs)


def _first_not_strict_inc(vals, pts):
    for k in range(len(vals) - 1):
        if not vals[k] < vals[k + 1]:
            return pts[k], pts[k + 1]
    return None


@dataclass
class Check:
    status: str
    witness: object = None


def _finite(lim):
    return lim not in (POS_INF, NEG_INF)


def validate_stack(s: RationalStack, min_size=1):
    """Check conditions i)-xi), divisibility and K >= 2 on the sampled window."""
    A = s.A
    rep = {}
    if len(A) < min_size:
        raise ValueError(f"window of size {len(A)} is below the minimum {min_size}")

    def fail(cond, w):
        if rep.get(cond, Check(PASS)).status != FAIL:
            rep[cond] = Check(FAIL, w)

    for c in CONDITIONS:
        rep[c] = Check(PASS)

    # i) and ii)
    for i in range(s.k0):
        for n in A:
            if s.zeta[i][n] != s.nu[i]:
                fail("i", (i, n))
                break
    seen = {}
    for i in range(s.k0):
        if s.nu[i] in seen:
            fail("ii", (s.nu[i], seen[s.nu[i]], ("nu", i)))
        seen[s.nu[i]] = ("nu", i)
    for j in range(s.k0, s.k1):
        for n in A:
            z = s.zeta[j][n]
            if z in seen:
                fail("ii", (z, seen[z], ("zeta", j, n)))
            seen[z] = ("zeta", j, n)

    unverified = {}
    for (i, j) in s.levels():
        brick = s.bricks[(i, j)]
        if not brick:
            fail("vi", (i, j, "empty brick"))
            continue
        for h in brick:
            vals = []
            for n in A:
                vec = h.table[n]
                if not vec.is_integral():
                    fail("integral", (i, j, h.name, n))
                if s.zeta[i][n] not in vec:
                    fail("iii", (i, j, h.name, n))
                for i2 in range(i):
                    if s.zeta[i2][n] in vec:
                        fail("iv", (i2, i, j, h.name, n))
                vals.append(vec[s.zeta[i][n]])
            # v) monotone trend of value / K
            ratios = [v / s.K[n] for v, n in zip(vals, A)]
            if not _monotone(ratios):
                fail("v", (i, j, h.name))
            else:
                law = s.law(i, h)
                if law is None:
                    unverified.setdefault("v", (i, j, h.name))
                else:
                    try:
                        law.limit()
                    except Unsupported:
                        unverified.setdefault("v", (i, j, h.name))
            # ix) strictly increasing magnitude
            bad = _first_not_strict_inc([abs(v) for v in vals], A)
            if bad:
                fail("ix", (i, j, h.name) + bad)
        # x) trichotomy
        for a_idx, h in enumerate(brick):
            for h2 in brick[a_idx + 1:]:
                signs = {(abs(s.value(i, h, n)) > abs(s.value(i, h2, n))) -
                         (abs(s.value(i, h, n)) < abs(s.value(i, h2, n))) for n in A}
                if len(signs) > 1:
                    fail("x", (i, j, h.name, h2.name))
        # vi) symbolic ratio limits, independent
        laws = [s.law(i, h) for h in brick]
        if any(lw is None for lw in laws):
            unverified.setdefault("vi", (i, j))
        else:
            ok = False
            try:
                for star in laws:
                    lims = [ratio_limit(lw, star) for lw in laws]
                    if all(_finite(x) for x in lims) and q_independent(lims):
                        ok = True
                        break
            except (Unsupported, ZeroDivisionError):
                unverified.setdefault("vi", (i, j))
                ok = None
            if ok is False:
                fail("vi", (i, j))
        # vii) cross-brick ratios decrease monotonically to 0
        for j2 in range(j):
            for h in brick:
                for h2 in s.bricks[(i, j2)]:
                    rs = [s.value(i, h, n) / s.value(i, h2, n) for n in A]
                    if not _monotone(rs):
                        fail("vii", (i, j, j2, h.name, h2.name))
                        continue
                    lw, lw2 = s.law(i, h), s.law(i, h2)
                    if lw is None or lw2 is None:
                        unverified.setdefault("vii", (i, j, j2))
                        continue
                    try:
                        lim = ratio_limit(lw, lw2)
                    except (Unsupported, ZeroDivisionError):
                        unverified.setdefault("vii", (i, j, j2))
                        continue
                    if not (isinstance(lim, QuadNum) and not lim):
                        fail("vii", (i, j, j2, h.name, h2.name, "limit"))

    # viii) (K/T) chi_nu_i in some brick at level i
    for i in range(s.k0):
        want = {n: FinSuppVec({s.nu[i]: Fraction(s.K[n], s.T)}) for n in A}
        if not any(all(h.table[n] == want[n] for n in A)
                   for j in range(s.l[i]) for h in s.bricks[(i, j)]):
            fail("viii", (i, s.nu[i]))

    # xi) fixed revisited coordinates have constant value / K at upper levels
    for i in range(s.k0, s.k1):
        for j in range(s.l[i]):
            for g in s.bricks[(i, j)]:
                common = set.intersection(*(set(g.table[n].support()) for n in A))
                for mu in sorted(common):
                    if len({g.table[n][mu] / s.K[n] for n in A}) > 1:
                        fail("xi", (i, j, g.name, mu))

    for n in A:
        if s.K[n] % (factorial(n) * s.T):
            fail("divisibility", ("n!T does not divide K_n", n))
        if s.K[n] < 2:
            fail("K>=2", n)

    for cond, w in unverified.items():
        if rep[cond].status == PASS:
            rep[cond] = Check(UNVERIFIED, w)
    return rep


def report_ok(rep, allow_unverified=False) -> bool:
    bad = {FAIL} if allow_unverified else {FAIL, UNVERIFIED}
    return all(c.status not in bad for c in rep.values())


def first_failure(rep):
    for cond in CONDITIONS:
        if rep[cond].status != PASS:
            return cond, rep[cond]
    return None
