"""Dense exact linear algebra over the rationals (row reduction on Fractions)."""

from __future__ import annotations

from fractions import Fraction
from math import lcm


def _copy(mat):
    return [[Fraction(x) for x in row] for row in mat]


def rref(mat):
    """Reduced row echelon form; returns (matrix, pivot columns)."""
    m = _copy(mat)
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(mat) -> int:
    if not mat:
        return 0
    return len(rref(mat)[1])


def inverse(mat):
    """Exact inverse of a square matrix; raises ValueError when singular."""
    n = len(mat)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in red]


def matmul(a, b):
    inner = len(b)
    cols = len(b[0]) if inner else 0
    return [[sum((a[i][k] * b[k][j] for k in range(inner)), Fraction(0)) for j in range(cols)]
            for i in range(len(a))]


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def denominator_lcm(mat) -> int:
    out = 1
    for row in mat:
        for x in row:
            out = lcm(out, Fraction(x).denominator)
    return out


def solve_rational(mat, rhs):
    """One rational solution x of mat @ x == rhs, or None if inconsistent.

    Free variables are set to zero.
    """
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    aug = [list(mat[i]) + [rhs[i]] for i in range(rows)]
    red, piv = rref(aug)
    if cols in piv:
        return None
    x = [Fraction(0)] * cols
    for i, c in enumerate(piv):
        x[c] = red[i][cols]
    return x
