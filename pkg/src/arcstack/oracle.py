"""Finite-horizon stand-in for an ultrafilter: homogeneous-subset refinement.

Every "there is a large set on which X is homogeneous" step of the
construction goes through a :class:`FilterOracle`.  It works on explicit
sorted windows of sample points and keeps a replayable decision log.
"""

from __future__ import annotations

import bisect
import random

from .errors import HorizonExhausted

DEFAULT_HORIZON = 512
DEFAULT_MIN_SIZE = 32

STRATEGIES = ("largest", "random")


def _tag_key(tag):
    # Tags are usually ints, tuples or frozensets; order them deterministically.
    if isinstance(tag, frozenset):
        return (1, tuple(sorted(tag)))
    return (0, tag)


def _longest_strict(values, increasing=True):
    """Positions of a longest strictly monotone subsequence (leftmost-ending)."""
    sign = 1 if increasing else -1
    tails, tail_pos = [], []
    prev = [-1] * len(values)
    for i, v in enumerate(values):
        key = sign * v
        j = bisect.bisect_left(tails, key)
        if j == len(tails):
            tails.append(key)
            tail_pos.append(i)
        else:
            tails[j] = key
            tail_pos[j] = i
        prev[i] = tail_pos[j - 1] if j else -1
    out = []
    i = tail_pos[-1] if tail_pos else -1
    while i != -1:
        out.append(i)
        i = prev[i]
    return out[::-1]


def is_strictly_monotone(values):
    pairs = list(zip(values, values[1:]))
    return all(a < b for a, b in pairs) or all(a > b for a, b in pairs)


def is_constant(values):
    return len(set(values)) <= 1


class FilterOracle:
    """Refines windows of sample points to homogeneous subsets.

    ``strategy`` is "largest" (largest eligible class, ties to the smallest
    tag) or "random" (seeded choice among classes of at least ``min_size``).
    """

    def __init__(self, horizon=DEFAULT_HORIZON, min_size=DEFAULT_MIN_SIZE, seed=0,
                 strategy="largest", start=0):
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown oracle strategy {strategy!r}")
        self.horizon = horizon
        self.min_size = min_size
        self.seed = seed
        self.strategy = strategy
        self.window = tuple(range(start, start + horizon))
        self._rng = random.Random(seed)
        self.log = []

    def _record(self, op, size_in, out, tag=None):
        self.log.append({"op": op, "in": size_in, "out": len(out), "tag": repr(tag)})

    def _check(self, op, subset, witness):
        if len(subset) < self.min_size:
            raise HorizonExhausted(
                f"{op}: homogeneous set of size {len(subset)} < {self.min_size}", witness)

    def _choose(self, classes):
        """classes: dict tag -> tuple of points.  Returns (tag, points)."""
        ordered = sorted(classes.items(), key=lambda kv: (-len(kv[1]), _tag_key(kv[0])))
        if self.strategy == "random":
            big = [kv for kv in ordered if len(kv[1]) >= self.min_size]
            if big:
                return big[self._rng.randrange(len(big))]
        return ordered[0]

    def refine_partition(self, A, classify, op="partition"):
        """Subset of A on which ``classify`` is constant."""
        A = tuple(A)
        if not A:
            raise HorizonExhausted(f"{op}: empty input window")
        classes = {}
        for n in A:
            classes.setdefault(classify(n), []).append(n)
        if len(classes) == 1:
            self._record(op, len(A), A, next(iter(classes)))
            self._check(op, A, None)
            return A
        tag, pts = self._choose({k: tuple(v) for k, v in classes.items()})
        self._record(op, len(A), pts, tag)
        self._check(op, pts, {"classes": {repr(k): len(v) for k, v in classes.items()}})
        return pts

    def refine_order(self, A, value, op="order"):
        """Subset of A on which ``value`` is constant or strictly monotone."""
        A = tuple(A)
        if not A:
            raise HorizonExhausted(f"{op}: empty input window")
        vals = [value(n) for n in A]
        if is_constant(vals) or is_strictly_monotone(vals):
            self._record(op, len(A), A, "homogeneous")
            self._check(op, A, None)
            return A
        A = self.refine_partition(A, lambda n: (value(n) > 0) - (value(n) < 0), op + ":sign")
        vals = [value(n) for n in A]
        candidates = {}
        const = {}
        for n, v in zip(A, vals):
            const.setdefault(v, []).append(n)
        cv, cpts = max(const.items(), key=lambda kv: (len(kv[1]), -kv[1][0]))
        candidates[("const",)] = tuple(cpts)
        candidates[("inc",)] = tuple(A[i] for i in _longest_strict(vals, True))
        candidates[("dec",)] = tuple(A[i] for i in _longest_strict(vals, False))
        tag, pts = self._choose(candidates)
        self._record(op, len(A), pts, tag)
        self._check(op, pts, {"const": len(cpts), "inc": len(candidates[("inc",)]),
                              "dec": len(candidates[("dec",)])})
        return pts

    def refine_injective(self, A, value, op="one-to-one"):
        """Subset of A on which ``value`` is constant or one-to-one."""
        A = tuple(A)
        if not A:
            raise HorizonExhausted(f"{op}: empty input window")
        seen = set()
        first = []
        const = {}
        for n in A:
            v = value(n)
            if v not in seen:
                seen.add(v)
                first.append(n)
            const.setdefault(v, []).append(n)
        if len(first) == len(A) or len(const) == 1:
            self._record(op, len(A), A, "homogeneous")
            self._check(op, A, None)
            return A
        _, cpts = max(const.items(), key=lambda kv: (len(kv[1]), -kv[1][0]))
        candidates = {("const",): tuple(cpts), ("inj",): tuple(first)}
        tag, pts = self._choose(candidates)
        self._record(op, len(A), pts, tag)
        self._check(op, pts, {"const": len(cpts), "inj": len(first)})
        return pts

    def restrict(self, A, keep, op="restrict"):
        """Plain filtering (cofinite shrinking); logged but not a choice."""
        A = tuple(A)
        out = tuple(n for n in A if keep(n))
        self._record(op, len(A), out)
        if not out:
            raise HorizonExhausted(f"{op}: nothing left of a window of size {len(A)}")
        return out
