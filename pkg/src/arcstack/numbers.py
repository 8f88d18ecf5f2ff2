"""Exact scalars: rationals and elements of a real quadratic field Q(sqrt d).

Every comparison here is exact.  Square roots only ever enter through
rational enclosures that are widened outward, so a bound derived from them
never overclaims.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction

from .errors import ResourceError, Unsupported

Rat = Fraction

_BITS_ENV = "ARCSTACK_MAX_BIGINT_BITS"


def bit_budget():
    raw = os.environ.get(_BITS_ENV)
    return int(raw) if raw else None


def check_budget(value):
    """Raise ResourceError if a rational's numerator or denominator is too big."""
    cap = bit_budget()
    if cap is None:
        return value
    if isinstance(value, Fraction):
        bits = max(value.numerator.bit_length(), value.denominator.bit_length())
    else:
        bits = int(value).bit_length()
    if bits > cap:
        raise ResourceError(f"value needs {bits} bits, budget is {cap}")
    return value


def as_rat(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact scalars")
    return Fraction(x)


def parse_rat(text) -> Fraction:
    """Parse "p/q", "p" or an int into a Fraction (no floats)."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not isinstance(text, str):
        raise TypeError(f"cannot parse {text!r} as a rational")
    return Fraction(text.strip())


def fmt_rat(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def squarefree(d: int) -> bool:
    if d < 2:
        return False
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


def sqrt_bounds(x, bits=64):
    """Rational (lower, upper) with lower <= sqrt(x) <= upper, width about 2**-bits."""
    x = as_rat(x)
    if x < 0:
        raise ValueError("sqrt of a negative number")
    if x == 0:
        return Fraction(0), Fraction(0)
    scale = 1 << bits
    # sqrt(p/q) = sqrt(p*q)/q
    p, q = x.numerator, x.denominator
    s = math.isqrt(p * q * scale * scale)
    lo = Fraction(s, q * scale)
    hi = lo if s * s == p * q * scale * scale else Fraction(s + 1, q * scale)
    return lo, hi


def sqrt_upper(x, bits=32) -> Fraction:
    return sqrt_bounds(x, bits)[1]


def sqrt_lower(x, bits=32) -> Fraction:
    return sqrt_bounds(x, bits)[0]


class QuadNum:
    """a + b*sqrt(d) with a, b rational and d a square-free integer >= 2.

    Rationals are stored with b == 0 and d == 1.  Arithmetic between two
    irrational values requires the same d.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d=1):
        a, b = as_rat(a), as_rat(b)
        d = int(d)
        if b == 0:
            d = 1
        elif not squarefree(d):
            raise Unsupported(f"sqrt({d}) is not a square-free radical")
        self.a, self.b, self.d = a, b, d

    @classmethod
    def coerce(cls, x) -> "QuadNum":
        if isinstance(x, QuadNum):
            return x
        return cls(as_rat(x))

    def is_rational(self):
        return self.b == 0

    def _join(self, other):
        other = QuadNum.coerce(other)
        if self.d != 1 and other.d != 1 and self.d != other.d:
            raise Unsupported(f"mixed radicals sqrt({self.d}) and sqrt({other.d})")
        return other, max(self.d, other.d)

    def __add__(self, other):
        other, d = self._join(other)
        return QuadNum(self.a + other.a, self.b + other.b, d)

    __radd__ = __add__

    def __neg__(self):
        return QuadNum(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-QuadNum.coerce(other))

    def __rsub__(self, other):
        return QuadNum.coerce(other) - self

    def __mul__(self, other):
        other, d = self._join(other)
        return QuadNum(self.a * other.a + self.b * other.b * d,
                       self.a * other.b + self.b * other.a, d)

    __rmul__ = __mul__

    def inverse(self):
        norm = self.a * self.a - self.b * self.b * self.d
        if norm == 0:
            raise ZeroDivisionError("inverse of zero")
        return QuadNum(self.a / norm, -self.b / norm, self.d)

    def __truediv__(self, other):
        return self * QuadNum.coerce(other).inverse()

    def __rtruediv__(self, other):
        return QuadNum.coerce(other) * self.inverse()

    def sign(self) -> int:
        a, b, d = self.a, self.b, self.d
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with b^2 d
        return sa if a * a > b * b * d else sb

    def __eq__(self, other):
        try:
            other = QuadNum.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.a == other.a and self.b == other.b and (self.b == 0 or self.d == other.d)

    def __hash__(self):
        return hash((self.a, self.b, self.d if self.b else 1))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def enclosure(self, bits=64):
        """Rational interval [lo, hi] containing the value."""
        if self.b == 0:
            return self.a, self.a
        lo, hi = sqrt_bounds(self.b * self.b * self.d, bits)
        if self.b > 0:
            return self.a + lo, self.a + hi
        return self.a - hi, self.a - lo

    def floor(self) -> int:
        if self.b == 0:
            return math.floor(self.a)
        bits = 64
        while True:
            lo, hi = self.enclosure(bits)
            if math.floor(lo) == math.floor(hi):
                return math.floor(lo)
            bits *= 2

    def round(self) -> int:
        """Nearest integer; halves round up (never hit for irrational values)."""
        return (self + Fraction(1, 2)).floor()

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def coords(self):
        """Coordinates over the Q-basis (1, sqrt d)."""
        return (self.a, self.b)

    def to_json(self):
        return {"a": fmt_rat(self.a), "b": fmt_rat(self.b), "d": self.d}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, (str, int)):
            return cls(parse_rat(obj))
        return cls(parse_rat(obj.get("a", "0")), parse_rat(obj.get("b", "0")), obj.get("d", 1))

    def __repr__(self):
        if self.b == 0:
            return f"QuadNum({self.a})"
        return f"QuadNum({self.a} + {self.b}*sqrt({self.d}))"


def q_independent(values) -> bool:
    """Exact Q-linear independence of a tuple of QuadNum values."""
    from .linalg import rank

    vals = [QuadNum.coerce(v) for v in values]
    radicals = {v.d for v in vals if v.d != 1}
    if len(radicals) > 1:
        raise Unsupported("values from different quadratic fields")
    rows = [list(v.coords()) for v in vals]
    return rank(rows) == len(rows)


def solve_in_span(basis, target):
    """Rational r with target == sum r_i basis_i, or None when not in the span."""
    from .linalg import solve_rational

    cols = [list(QuadNum.coerce(b).coords()) for b in basis]
    rhs = list(QuadNum.coerce(target).coords())
    # rows: coordinate index; columns: basis element
    mat = [[cols[j][i] for j in range(len(cols))] for i in range(2)]
    return solve_rational(mat, rhs)
