"""Density of linear flows on the torus, certified on a grid, and subarc search.

``find_L`` certifies a length L such that the curve x -> (theta_k x mod 1)_k,
x in [0, L], is eps-dense in T^r.  ``find_subarc`` finds a short arc K inside
a given arc J whose image under x -> (a_k x mod 1)_k stays in a ball.

Floating point is only used to discard candidates and to query a k-d tree
during certification; the certification keeps a safety margin and every
subarc returned is verified in exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.spatial import cKDTree

from .circle import FULL, Arc, frac_part
from .errors import CapExceeded, DependenceDetected, NotFound
from .numbers import QuadNum, as_rat, q_independent, sqrt_upper

DEFAULT_CAP = 4096
MAX_DIM = 4
_SAFETY = 1e-9


@dataclass(frozen=True)
class DensityCert:
    L: int
    eps: Fraction
    step: Fraction
    mesh: Fraction

    def to_json(self):
        return {"L": self.L, "eps": str(self.eps), "step": str(self.step), "mesh": str(self.mesh)}


def _theta(theta):
    theta = tuple(QuadNum.coerce(t) for t in theta)
    if not theta:
        raise ValueError("empty theta")
    if len(theta) > MAX_DIM:
        raise ValueError(f"dimension {len(theta)} above the supported {MAX_DIM}")
    if not q_independent(theta):
        raise DependenceDetected(f"{theta} is Q-linearly dependent")
    return theta


def speed_upper(theta) -> Fraction:
    """Rational upper bound of sqrt(sum theta_k^2)."""
    sq = sum((t.enclosure(64)[1] ** 2 if t.sign() >= 0 else t.enclosure(64)[0] ** 2
              for t in theta), Fraction(0))
    return sqrt_upper(sq) + Fraction(1, 1 << 20)


def _grid(r, mesh):
    k = math.ceil(1 / mesh)
    axis = (np.arange(k) + 0.5) / k
    pts = np.stack(np.meshgrid(*([axis] * r), indexing="ij"), axis=-1).reshape(-1, r)
    return pts, Fraction(1, k)


def _samples(theta_f, L, step):
    count = int(math.ceil(L / step)) + 1
    xs = np.arange(count, dtype=np.float64) * float(step)
    pts = np.mod(np.outer(xs, theta_f), 1.0)
    pts[pts >= 1.0] = 0.0
    return pts


def certify(theta, eps, L, step) -> bool:
    """Every point of T^r is within eps of some sample of the curve on [0, L]."""
    r = len(theta)
    s_r = sqrt_upper(r)
    # grid of mesh eps/s_r: every torus point is within eps/2 of a grid point
    grid, mesh = _grid(r, as_rat(eps) / s_r)
    theta_f = np.array([float(t) for t in theta])
    tree = cKDTree(_samples(theta_f, L, step), boxsize=1.0)
    dist, _ = tree.query(grid, k=1)
    return bool(np.all(dist < float(eps) / 2 - _SAFETY))


def _tube_floor(theta, eps) -> int:
    """Largest power of two below any L that can pass `certify`.

    The eps/2-neighbourhood of a curve of length l in T^r has volume at most
    l w (eps/2)^(r-1) + w (eps/2)^r with w = 6 bounding unit-ball volumes, and
    it must cover the torus.  Powers of two under that length always fail.
    """
    r = len(theta)
    h = float(eps) / 2
    need = (1 - 6 * h ** r) / (6 * h ** (r - 1)) / float(speed_upper(theta))
    L = 1
    while 2 * L <= need * 0.999:
        L *= 2
    return L


@lru_cache(maxsize=256)
def _find_L_cached(theta, eps, cap):
    r = len(theta)
    if r == 1:
        # an interval of length 1/|theta| already covers the circle
        inv = (1 / abs(theta[0])).enclosure(64)[1]
        L = max(1, math.ceil(inv))
        return DensityCert(L, eps, Fraction(0), Fraction(0))
    step = eps / (4 * speed_upper(theta))
    mesh = eps / sqrt_upper(r)
    L = _tube_floor(theta, eps)
    while L <= cap:
        if certify(theta, eps, L, step):
            return DensityCert(L, eps, step, mesh)
        L *= 2
    raise CapExceeded(f"no certified L <= {cap} for theta={theta} eps={eps}")


def find_L(theta, eps, cap=DEFAULT_CAP) -> DensityCert:
    eps = as_rat(eps)
    if not 0 < eps < Fraction(1, 2):
        raise ValueError("eps must lie in (0, 1/2)")
    return _find_L_cached(_theta(theta), eps, cap)


def recertify(theta, cert: DensityCert, refine=4) -> bool:
    """Re-run the density check at a finer sampling step."""
    theta = _theta(theta)
    if len(theta) == 1:
        return True
    return certify(theta, cert.eps, cert.L, cert.step / refine)


# ---------------------------------------------------------------- subarcs

def torus_dist2(point, center) -> Fraction:
    """Exact squared Euclidean distance on T^r with per-coordinate wraparound."""
    total = Fraction(0)
    for p, c in zip(point, center):
        d = frac_part(p - c)
        d = min(d, 1 - d)
        total += d * d
    return total


def in_ball(a, x, center, radius) -> bool:
    return torus_dist2([k * x for k in a], center) < radius * radius


def audit_subarc(a, K: Arc, center, eps, points=16) -> bool:
    """Exact check that `points` interior points of K map into the 4*eps ball."""
    radius = 4 * as_rat(eps)
    step = K.length / (points + 1)
    return all(in_ball(a, K.lo + step * (i + 1), center, radius) for i in range(points))


def subarc_length(a0, eps, norm=None) -> Fraction:
    """4 eps / (norm |a0|); norm defaults to a rational upper bound of sqrt(r)."""
    return 4 * as_rat(eps) / (as_rat(norm) * abs(a0))


def _check_order(a):
    mags = [abs(k) for k in a]
    if any(m == 0 for m in mags):
        raise ValueError("zero multiplier")
    if any(x <= y for x, y in zip(mags, mags[1:])):
        raise ValueError(f"multipliers {a} are not strictly decreasing in magnitude")


def find_subarc(a, J: Arc, center, eps, L, norm=None) -> Arc:
    """Leftmost arc K inside J of length 4 eps/(norm |a0|) with image in the ball.

    The image of every point of K lies in the open ball of radius 4 eps
    around ``center``; we ensure this by requiring the image of K's center
    to lie within 2 eps and norm >= sqrt(r).
    """
    a = tuple(int(k) for k in a)
    _check_order(a)
    r = len(a)
    center = tuple(frac_part(as_rat(c)) for c in center)
    eps = as_rat(eps)
    if norm is None:
        norm = Fraction(1) if r == 1 else sqrt_upper(r)
    elif as_rat(norm) ** 2 < r:
        raise ValueError("norm must be at least sqrt(r)")
    a0 = a[0]
    lk = subarc_length(a0, eps, norm)
    if J.full:
        start, stop = Fraction(0), None
    else:
        start, stop = J.lo + lk / 2, J.lo + J.length - lk / 2
        if stop < start:
            raise NotFound("J is shorter than the requested subarc")
    if r == 1:
        period = Fraction(1, abs(a0))
        x = start + (center[0] / a0 - start) % period
        if stop is not None and x > stop:
            raise NotFound("no exact preimage inside J")
        return Arc.centered(x, lk)

    window = Fraction(3 * L, abs(a0))
    end = start + window if stop is None else min(stop, start + window)
    step = eps / (2 * norm * abs(a0))
    count = int((end - start) / step) + 1
    # y-parametrization: a_k x = a_k start + k' (a_k step), reduced mod 1 exactly
    base = np.array([float(frac_part(k * start)) for k in a])
    inc = np.array([float(frac_part(k * step)) for k in a])
    c = np.array([float(x) for x in center])
    radius = 2 * eps
    idx = np.arange(count, dtype=np.float64)
    pos = np.mod(base[None, :] + np.outer(idx, inc) - c[None, :], 1.0)
    pos = np.minimum(pos, 1.0 - pos)
    d2 = np.sum(pos * pos, axis=1)
    cand = np.nonzero(d2 < float(radius) ** 2 * (1 + 1e-6) + 1e-12)[0]
    for i in cand:
        x = start + int(i) * step
        if in_ball(a, x, center, radius):
            K = Arc.centered(x, lk)
            if J.full or K.subset_of(J):
                return K
    raise NotFound(f"no admissible x in the first {window} of J for a={a}")
