"""Open arcs of the circle T = R/Z with rational endpoints, and arc functions."""

from __future__ import annotations

from fractions import Fraction

from .numbers import as_rat, fmt_rat, parse_rat


def frac_part(x) -> Fraction:
    x = as_rat(x)
    return x - (x.numerator // x.denominator)


class Arc:
    """Either FULL or the projection of the open interval (lo, lo + length).

    lo is normalized into [0, 1) and 0 < length <= 1.  A length-1 arc is the
    circle minus one point; only FULL is the whole circle.
    """

    __slots__ = ("lo", "length", "full")

    def __init__(self, lo=None, hi=None, *, full=False):
        if full:
            self.lo, self.length, self.full = Fraction(0), Fraction(1), True
            return
        lo, hi = as_rat(lo), as_rat(hi)
        length = hi - lo
        if not 0 < length <= 1:
            raise ValueError(f"arc length {length} outside (0, 1]")
        self.lo, self.length, self.full = frac_part(lo), length, False

    @classmethod
    def centered(cls, center, length):
        center, length = as_rat(center), as_rat(length)
        if length > 1:
            return FULL
        return cls(center - length / 2, center + length / 2)

    @property
    def hi(self):
        return self.lo + self.length

    @property
    def center(self):
        return frac_part(self.lo + self.length / 2)

    def contains(self, x) -> bool:
        if self.full:
            return True
        t = frac_part(as_rat(x) - self.lo)
        return 0 < t < self.length

    def closure_contains(self, x) -> bool:
        if self.full:
            return True
        t = frac_part(as_rat(x) - self.lo)
        return t <= self.length

    def __contains__(self, x):
        return self.contains(x)

    def subset_of(self, other) -> bool:
        """Open arc self is a subset of open arc other."""
        if other.full:
            return True
        if self.full:
            return False
        t = frac_part(self.lo - other.lo)
        return t + self.length <= other.length

    def closure_subset_of(self, other) -> bool:
        """closure(self) is a subset of open arc other."""
        if other.full:
            return True
        if self.full:
            return False
        t = frac_part(self.lo - other.lo)
        return t > 0 and t + self.length < other.length

    def closures_disjoint(self, other) -> bool:
        if self.full or other.full:
            return False
        t = frac_part(other.lo - self.lo)
        return t > self.length and t + other.length < 1

    def __eq__(self, other):
        if not isinstance(other, Arc):
            return NotImplemented
        if self.full or other.full:
            return self.full and other.full
        return self.lo == other.lo and self.length == other.length

    def __hash__(self):
        return hash(("full",)) if self.full else hash((self.lo, self.length))

    def to_json(self):
        if self.full:
            return "FULL"
        return f"lo={fmt_rat(self.lo)} hi={fmt_rat(self.hi)}"

    @classmethod
    def from_json(cls, text):
        if text == "FULL":
            return FULL
        parts = dict(p.split("=", 1) for p in text.split())
        return cls(parse_rat(parts["lo"]), parse_rat(parts["hi"]))

    def __repr__(self):
        return "Arc(FULL)" if self.full else f"Arc({self.lo}, {self.hi})"


FULL = Arc(full=True)


def _as_int(k) -> int:
    k = as_rat(k)
    if k.denominator != 1:
        raise ValueError(f"arc scaling needs an integer, got {k}")
    return int(k)


def int_scale(S, a: Arc) -> Arc:
    """The image {S*x : x in a}."""
    S = _as_int(S)
    if S == 0:
        raise ValueError("scaling an arc by 0 is degenerate")
    if a.full:
        return FULL
    length = abs(S) * a.length
    if length > 1:
        return FULL
    return Arc.centered(S * a.center, length)


def minkowski(terms):
    """(center, length) of sum k_i a_i, or None when some arc is FULL.

    An empty sum is the point 0, returned as (0, 0).
    """
    center, length = Fraction(0), Fraction(0)
    for k, a in terms:
        k = _as_int(k)
        if k == 0:
            raise ValueError("zero coefficient in an arc sum")
        if a.full:
            return None
        center += k * a.center
        length += abs(k) * a.length
    return frac_part(center), length


def lin_comb(terms) -> Arc:
    terms = list(terms)
    if not terms:
        raise ValueError("an empty arc sum is a point, not an arc")
    cl = minkowski(terms)
    if cl is None or cl[1] > 1:
        return FULL
    return Arc.centered(*cl)


class ArcFunction:
    """Sparse map index -> Arc; unmapped indices are the whole circle."""

    __slots__ = ("_d",)

    def __init__(self, data=None):
        self._d = {int(k): v for k, v in (data or {}).items() if not v.full}

    @classmethod
    def uniform(cls, centers, length):
        return cls({mu: Arc.centered(c, length) for mu, c in centers.items()})

    def __getitem__(self, mu) -> Arc:
        return self._d.get(mu, FULL)

    def support(self):
        return frozenset(self._d)

    def items(self):
        return sorted(self._d.items())

    def __len__(self):
        return len(self._d)

    def __eq__(self, other):
        return isinstance(other, ArcFunction) and self._d == other._d

    def to_json(self):
        return {str(k): v.to_json() for k, v in self.items()}

    @classmethod
    def from_json(cls, obj):
        return cls({int(k): Arc.from_json(v) for k, v in obj.items()})

    def __repr__(self):
        return f"ArcFunction({dict(self.items())})"


def scale_arcfn(S, phi: ArcFunction) -> ArcFunction:
    return ArcFunction({mu: int_scale(S, a) for mu, a in phi.items()})


def refines_at(psi: ArcFunction, phi: ArcFunction, mu) -> bool:
    a, b = psi[mu], phi[mu]
    return a == b or a.closure_subset_of(b)


def refines(psi: ArcFunction, phi: ArcFunction) -> bool:
    return first_unrefined(psi, phi) is None


def first_unrefined(psi: ArcFunction, phi: ArcFunction):
    """First index where psi <= phi fails, or None."""
    for mu in sorted(psi.support() | phi.support()):
        if not refines_at(psi, phi, mu):
            return mu
    return None
