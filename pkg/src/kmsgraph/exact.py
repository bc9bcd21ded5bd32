"""Fraction-exact Gaussian elimination over the rationals."""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def to_fraction_matrix(rows) -> list[list[Fraction]]:
    return [[Fraction(int(x)) if not isinstance(x, Fraction) else x for x in row] for row in rows]


def rref(rows) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    m = [list(r) for r in to_fraction_matrix(rows)]
    if not m:
        return m, []
    n_cols = len(m[0])
    pivots = []
    r = 0
    for c in range(n_cols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def primitive_integer_vector(v) -> list[int]:
    """Scale a rational vector to integers with gcd 1 and first nonzero > 0."""
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return ints
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x != 0)
    if lead < 0:
        ints = [-x for x in ints]
    return ints


def nullspace(rows, n_cols=None) -> list[list[int]]:
    """Basis of the right null space, one vector per free column, each in
    primitive integer form."""
    if not rows:
        if n_cols is None:
            raise ValueError("n_cols required for an empty matrix")
        return [[int(i == j) for j in range(n_cols)] for i in range(n_cols)]
    m, pivots = rref(rows)
    n_cols = len(m[0])
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n_cols
        v[f] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -m[r][f]
        basis.append(primitive_integer_vector(v))
    return basis


def solve_unique(rows, rhs) -> list[Fraction] | None:
    """Solve a consistent square-or-tall system with a unique solution;
    None when inconsistent or underdetermined."""
    aug = [list(r) + [b] for r, b in zip(to_fraction_matrix(rows), rhs)]
    m, pivots = rref(aug)
    n = len(aug[0]) - 1
    if n in pivots or len(pivots) != n:
        return None
    return [m[i][n] for i in range(n)]


def matvec(rows, v) -> list[Fraction]:
    return [sum((a * b for a, b in zip(r, v)), Fraction(0)) for r in rows]
