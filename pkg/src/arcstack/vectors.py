"""Finite-support rational vectors and symbolically specified vector sequences.

A :class:`SeqSpec` is a finite sum of *tracks*.  Each track pairs an index
path (a constant index, or an injective arithmetic progression of indices)
with a value law built from terms ``c * beta**n * n**k`` (exact) or
``round(alpha * beta**n * n**k) * q`` (rounded, alpha in Q(sqrt d)).  The
restricted form makes eventual properties of a sequence decidable: its
leading growth term, ratio limits and whether it is bounded.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .errors import ScenarioInvalid, Unsupported
from .numbers import QuadNum, as_rat, check_budget, fmt_rat, parse_rat

POS_INF = "+inf"
NEG_INF = "-inf"

_UNIT_KEY = (Fraction(1), 0)


class FinSuppVec(Mapping):
    """Sparse map index -> nonzero rational.  Treated as immutable."""

    __slots__ = ("_d",)

    def __init__(self, data=None):
        d = {}
        if data:
            items = data.items() if isinstance(data, Mapping) else data
            for k, v in items:
                v = as_rat(v)
                if v != 0:
                    d[int(k)] = d.get(int(k), Fraction(0)) + v
                    if d[int(k)] == 0:
                        del d[int(k)]
        self._d = d

    @classmethod
    def unit(cls, mu, value=1):
        return cls({mu: value})

    def __getitem__(self, key):
        return self._d.get(key, Fraction(0))

    def __iter__(self):
        return iter(sorted(self._d))

    def __len__(self):
        return len(self._d)

    def __contains__(self, key):
        return key in self._d

    def support(self):
        return frozenset(self._d)

    def __add__(self, other):
        out = dict(self._d)
        for k, v in other.items():
            s = out.get(k, Fraction(0)) + v
            if s == 0:
                out.pop(k, None)
            else:
                out[k] = s
        return FinSuppVec(out)

    def __neg__(self):
        return FinSuppVec({k: -v for k, v in self._d.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = as_rat(c)
        if c == 0:
            return FinSuppVec()
        return FinSuppVec({k: c * v for k, v in self._d.items()})

    def __eq__(self, other):
        if isinstance(other, FinSuppVec):
            return self._d == other._d
        if isinstance(other, Mapping):
            return self._d == {k: v for k, v in other.items() if v != 0}
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._d.items()))

    def is_integral(self):
        return all(v.denominator == 1 for v in self._d.values())

    def denominator(self):
        out = 1
        for v in self._d.values():
            out = lcm(out, v.denominator)
        return out

    def l1(self):
        return sum((abs(v) for v in self._d.values()), Fraction(0))

    def to_json(self):
        return {str(k): fmt_rat(self._d[k]) for k in sorted(self._d)}

    @classmethod
    def from_json(cls, obj):
        return cls({int(k): parse_rat(v) for k, v in obj.items()})

    def __repr__(self):
        inner = ", ".join(f"{k}: {v}" for k, v in sorted(self._d.items()))
        return f"FinSuppVec({{{inner}}})"


def scale_seq(s, f):
    """Pointwise product (s.f)(n) = s_n * f(n) of a scalar and a vector sequence."""
    if set(s) != set(f):
        raise ValueError("scalar and vector sequences have different domains")
    return {n: f[n].scale(s[n]) for n in sorted(f)}


# ---------------------------------------------------------------- index paths

@dataclass(frozen=True, order=True)
class ConstPath:
    mu: int

    def index(self, n):
        return self.mu

    @property
    def constant(self):
        return True

    def to_json(self):
        return {"const": self.mu}


@dataclass(frozen=True, order=True)
class InjPath:
    base: int
    stride: int

    def __post_init__(self):
        if self.stride < 1 or self.base < 0:
            raise ScenarioInvalid(f"bad injective path base={self.base} stride={self.stride}")

    def index(self, n):
        return self.base + n * self.stride

    @property
    def constant(self):
        return False

    def contains(self, mu):
        return mu >= self.base and (mu - self.base) % self.stride == 0

    def to_json(self):
        return {"inj": [self.base, self.stride]}


def path_from_json(obj):
    if "const" in obj:
        return ConstPath(int(obj["const"]))
    base, stride = obj["inj"]
    return InjPath(int(base), int(stride))


def _progressions_meet(p, q):
    # base_p + s_p*n == base_q + s_q*m has a solution with n, m >= 0 iff
    # the congruence is solvable (then infinitely many solutions exist).
    from math import gcd

    g = gcd(p.stride, q.stride)
    return (q.base - p.base) % g == 0


def check_paths_disjoint(paths):
    """Raise ScenarioInvalid if two distinct paths can hit the same index."""
    paths = sorted(set(paths), key=lambda p: (p.constant is False, p))
    inj = [p for p in paths if isinstance(p, InjPath)]
    consts = [p for p in paths if isinstance(p, ConstPath)]
    for i, p in enumerate(inj):
        for q in inj[i + 1:]:
            if _progressions_meet(p, q):
                raise ScenarioInvalid(f"injective blocks {p} and {q} overlap")
        for c in consts:
            if p.contains(c.mu):
                raise ScenarioInvalid(f"constant index {c.mu} lies in block {p}")


# ---------------------------------------------------------------- value laws

def _pow_term(beta, k, n):
    return beta ** n * (Fraction(n) ** k if k else 1)


class Law:
    """A value law n -> rational, as a sum of exact and rounded terms.

    ``exact`` maps (beta, k) -> rational coefficient c (term c*beta**n*n**k);
    ``rounded`` maps (alpha, beta, k) -> rational q (term round(alpha*beta**n*n**k)*q).
    """

    __slots__ = ("exact", "rounded")

    def __init__(self, exact=None, rounded=None):
        ex = {}
        for (beta, k), c in (exact or {}).items():
            key = (as_rat(beta), int(k))
            c = ex.get(key, Fraction(0)) + as_rat(c)
            if c == 0:
                ex.pop(key, None)
            else:
                ex[key] = c
        ro = {}
        for (alpha, beta, k), q in (rounded or {}).items():
            alpha, beta, k, q = QuadNum.coerce(alpha), as_rat(beta), int(k), as_rat(q)
            if q == 0:
                continue
            if beta <= 0:
                raise Unsupported("beta must be positive")
            if (beta, k) == _UNIT_KEY:
                # round(alpha) is a constant: fold into the exact part
                key = _UNIT_KEY
                c = ex.get(key, Fraction(0)) + alpha.round() * q
                if c == 0:
                    ex.pop(key, None)
                else:
                    ex[key] = c
                continue
            if (beta, k) < _UNIT_KEY:
                raise Unsupported("rounded terms must grow (beta > 1, or beta == 1 and k > 0)")
            if alpha.is_rational() and beta.denominator == 1 and alpha.a.denominator == 1:
                key = (beta, k)
                c = ex.get(key, Fraction(0)) + alpha.a * q
                if c == 0:
                    ex.pop(key, None)
                else:
                    ex[key] = c
                continue
            key = (alpha, beta, k)
            s = ro.get(key, Fraction(0)) + q
            if s == 0:
                ro.pop(key, None)
            else:
                ro[key] = s
        self.exact = ex
        self.rounded = ro

    @classmethod
    def poly(cls, coeffs):
        return cls({(1, i): c for i, c in enumerate(coeffs)})

    @classmethod
    def const(cls, c):
        return cls({(1, 0): c})

    def is_zero(self):
        return not self.exact and not self.rounded

    def value(self, n) -> Fraction:
        total = Fraction(0)
        for (beta, k), c in self.exact.items():
            total += c * _pow_term(beta, k, n)
        for (alpha, beta, k), q in self.rounded.items():
            total += (alpha * _pow_term(beta, k, n)).round() * q
        return check_budget(total)

    def __add__(self, other):
        ex = dict(self.exact)
        for key, c in other.exact.items():
            ex[key] = ex.get(key, Fraction(0)) + c
        ro = dict(self.rounded)
        for key, q in other.rounded.items():
            ro[key] = ro.get(key, Fraction(0)) + q
        return Law(ex, ro)

    def scale(self, c):
        c = as_rat(c)
        return Law({k: c * v for k, v in self.exact.items()},
                   {k: c * v for k, v in self.rounded.items()})

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, Law) and self.exact == other.exact and self.rounded == other.rounded

    def __hash__(self):
        return hash((frozenset(self.exact.items()), frozenset(self.rounded.items())))

    # -- asymptotics

    def coefficients(self):
        """Asymptotic coefficient of beta**n * n**k for every growth key."""
        out = {}
        for key, c in self.exact.items():
            out[key] = out.get(key, QuadNum(0)) + c
        for (alpha, beta, k), q in self.rounded.items():
            key = (beta, k)
            out[key] = out.get(key, QuadNum(0)) + alpha * q
        return {k: v for k, v in out.items() if v}

    def error_bound(self) -> Fraction:
        """Bound on |value(n) - sum of asymptotic terms| coming from rounding."""
        return sum((abs(q) for q in self.rounded.values()), Fraction(0)) / 2

    def lead(self):
        """(key, coefficient) of the dominant growth term, or None."""
        coeffs = self.coefficients()
        if not coeffs:
            if self.rounded:
                raise Unsupported("law reduces to an undetermined bounded rounding residue")
            return None
        key = max(coeffs)
        if key <= _UNIT_KEY and self.rounded:
            raise Unsupported("bounded law with rounding residue has no decidable limit")
        return key, coeffs[key]

    def bounded(self) -> bool:
        ld = self.lead()
        return ld is None or ld[0] <= _UNIT_KEY

    def limit(self):
        """Limit as n -> oo: a QuadNum, POS_INF or NEG_INF."""
        ld = self.lead()
        if ld is None:
            return QuadNum(0)
        key, c = ld
        if key < _UNIT_KEY:
            return QuadNum(0)
        if key == _UNIT_KEY:
            return c
        return POS_INF if c.sign() > 0 else NEG_INF

    def to_json(self):
        terms = []
        for (beta, k), c in sorted(self.exact.items()):
            terms.append({"q": fmt_rat(c), "beta": fmt_rat(beta), "k": k, "round": False})
        for (alpha, beta, k), q in sorted(self.rounded.items(), key=lambda t: (t[0][1], t[0][2], float(t[0][0]))):
            terms.append({"q": fmt_rat(q), "alpha": alpha.to_json(), "beta": fmt_rat(beta),
                          "k": k, "round": True})
        return {"terms": terms}

    @classmethod
    def from_json(cls, obj):
        if "poly" in obj:
            return cls.poly([parse_rat(c) for c in obj["poly"]])
        ex, ro = {}, {}
        for t in obj.get("terms", []):
            q = parse_rat(t.get("q", "1"))
            alpha = QuadNum.from_json(t.get("alpha", "1"))
            beta = parse_rat(t.get("beta", "1"))
            k = int(t.get("k", 0))
            rnd = t.get("round", not alpha.is_rational())
            if not rnd:
                if not alpha.is_rational():
                    raise ScenarioInvalid("irrational alpha requires a rounded term")
                key = (beta, k)
                ex[key] = ex.get(key, Fraction(0)) + alpha.a * q
            else:
                key = (alpha, beta, k)
                ro[key] = ro.get(key, Fraction(0)) + q
        return cls(ex, ro)

    def __repr__(self):
        return f"Law({self.to_json()['terms']})"


def ratio_limit(num: Law, den: Law):
    """Limit of num(n)/den(n); den must be eventually nonzero."""
    dl = den.lead()
    if dl is None:
        raise ZeroDivisionError("ratio against an eventually-zero law")
    nl = num.lead()
    if nl is None:
        return QuadNum(0)
    if nl[0] < dl[0]:
        return QuadNum(0)
    if nl[0] == dl[0]:
        return nl[1] / dl[1]
    return POS_INF if nl[1].sign() * dl[1].sign() > 0 else NEG_INF


# ---------------------------------------------------------------- sequences

class SeqSpec:
    """A symbolic element of G^omega: a finite sum of (path, law) tracks."""

    __slots__ = ("tracks", "name")

    def __init__(self, tracks=None, name=None):
        merged = {}
        items = tracks.items() if isinstance(tracks, Mapping) else (tracks or [])
        for path, law in items:
            merged[path] = merged[path] + law if path in merged else law
        self.tracks = {p: l for p, l in merged.items() if not l.is_zero()}
        self.name = name

    @classmethod
    def const_unit(cls, mu, name=None):
        """The constant sequence chi_mu at every n."""
        return cls({ConstPath(mu): Law.const(1)}, name=name or f"chi[{mu}]")

    def eval(self, n) -> FinSuppVec:
        if n < 0:
            raise ValueError("sample points are non-negative")
        out = {}
        for path, law in self.tracks.items():
            v = law.value(n)
            if v:
                idx = path.index(n)
                out[idx] = out.get(idx, Fraction(0)) + v
        return FinSuppVec(out)

    def sample(self, points):
        return {n: self.eval(n) for n in points}

    def law_on(self, path) -> Law:
        return self.tracks.get(path, Law())

    def paths(self):
        return sorted(self.tracks, key=lambda p: (not p.constant, p))

    def is_zero(self):
        return not self.tracks

    def __add__(self, other):
        tr = dict(self.tracks)
        for p, l in other.tracks.items():
            tr[p] = tr[p] + l if p in tr else l
        return SeqSpec(tr)

    def scale(self, c):
        return SeqSpec({p: l.scale(c) for p, l in self.tracks.items()})

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, SeqSpec) and self.tracks == other.tracks

    def __hash__(self):
        return hash(frozenset(self.tracks.items()))

    def to_json(self):
        return {"tracks": [{"path": p.to_json(), "law": self.tracks[p].to_json()}
                           for p in self.paths()]}

    @classmethod
    def from_json(cls, obj, name=None):
        tracks = [(path_from_json(t["path"]), Law.from_json(t["law"])) for t in obj["tracks"]]
        return cls(tracks, name=name)

    def __repr__(self):
        label = f"{self.name}: " if self.name else ""
        return f"SeqSpec({label}{len(self.tracks)} tracks)"
