"""Spectral data of nonnegative integer matrices.

Integer spectral radii are detected exactly (rank test over the rationals);
anything else is reported as a float with an explicit tolerance.
"""

from __future__ import annotations

import cmath
import math
import numbers
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exact
from .errors import GraphError, PreconditionError
from .graph import DirectedGraph, build_graph, strongly_connected_components

RADIUS_TOL = 1e-10
PERRON_TOL = 1e-9
MATCH_TOL = 1e-8
MAX_ITER = 100_000


@dataclass(frozen=True)
class TaggedReal:
    value: float
    exact: Fraction | None = None
    tolerance: float | None = None

    def __post_init__(self):
        if self.exact is None and not (self.tolerance and self.tolerance > 0):
            raise ValueError("numeric TaggedReal needs a positive tolerance")

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def __float__(self):
        return float(self.value)

    def to_dict(self) -> dict:
        if self.is_exact:
            return {"exact": fraction_str(self.exact), "approx": float(self.value)}
        return {"approx": float(self.value), "tolerance": self.tolerance}


@dataclass(frozen=True)
class SpectralReport:
    radius: TaggedReal
    radius_is_eigenvalue: bool
    multiplicity: int
    right_eigenspace_basis: list
    left_eigenspace_basis: list
    perron_right: tuple | None = None
    perron_left: tuple | None = None

    def to_dict(self) -> dict:
        def vec(v):
            return [fraction_str(x) if isinstance(x, numbers.Rational) else float(x) for x in v]

        return {
            "radius": self.radius.to_dict(),
            "radius_is_eigenvalue": self.radius_is_eigenvalue,
            "multiplicity": self.multiplicity,
            "exact": self.radius.is_exact,
            "right_eigenspace_basis": [vec(v) for v in self.right_eigenspace_basis],
            "left_eigenspace_basis": [vec(v) for v in self.left_eigenspace_basis],
            "perron_right": None if self.perron_right is None else vec(self.perron_right),
            "perron_left": None if self.perron_left is None else vec(self.perron_left),
        }


def fraction_str(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def as_matrix(d) -> np.ndarray:
    if isinstance(d, DirectedGraph):
        return np.asarray(d.matrix, dtype=np.int64)
    a = np.asarray(d)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise GraphError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.equal(np.mod(a, 1), 0)):
        raise GraphError("matrix entries must be integers")
    a = a.astype(np.int64)
    if (a < 0).any():
        raise GraphError("matrix entries must be nonnegative")
    return a


def pattern_graph(a: np.ndarray) -> DirectedGraph:
    n = a.shape[0]
    return build_graph(n, [(int(i), int(j)) for i, j in zip(*np.nonzero(a))])


def is_irreducible(d) -> bool:
    a = as_matrix(d)
    if a.shape[0] == 1:
        return bool(a[0, 0])
    return len(strongly_connected_components(pattern_graph(a))) == 1


def _power_iteration(a: np.ndarray) -> tuple[float, np.ndarray, float, float]:
    """Perron root and vector of an irreducible nonnegative matrix.

    Iterates on A + I, which is primitive, starting from the all-ones vector.
    Returns (rho, vector, lower, upper) where [lower, upper] is the
    Collatz-Wielandt bracket of the last iterate.
    """
    n = a.shape[0]
    b = a.astype(float) + np.eye(n)
    x = np.full(n, 1.0 / n)
    prev = None
    lo, hi = 0.0, float(a.sum(axis=1).max())
    rq = hi
    for _ in range(MAX_ITER):
        y = b @ x
        ratios = y / x
        lo, hi = float(ratios.min()) - 1.0, float(ratios.max()) - 1.0
        rq = float(y.sum()) - 1.0
        x = y / y.sum()
        scale = max(1.0, abs(rq))
        if prev is not None and abs(rq - prev) < 1e-12 and hi - lo < 1e-11 * scale:
            break
        prev = rq
    return rq, x, lo, hi


def _numeric_radius(a: np.ndarray) -> tuple[float, float, float]:
    """Max over strongly connected blocks of each block's Perron root."""
    best = (0.0, 0.0, 0.0)
    for comp in strongly_connected_components(pattern_graph(a)):
        sub = a[np.ix_(comp, comp)]
        if len(comp) == 1 and sub[0, 0] == 0:
            continue
        rho, _, lo, hi = _power_iteration(sub)
        if rho > best[0]:
            best = (rho, lo, hi)
    return best


def _shifted(a: np.ndarray, lam) -> list[list[Fraction]]:
    lam = Fraction(lam)
    n = a.shape[0]
    return [[Fraction(int(a[i, j])) - (lam if i == j else 0) for j in range(n)] for i in range(n)]


def spectral_radius(d) -> TaggedReal:
    a = as_matrix(d)
    rho, lo, hi = _numeric_radius(a)
    rows = a.sum(axis=1)
    lo_int = max(int(rows.min()), math.ceil(min(lo, rho) - MATCH_TOL))
    hi_int = min(int(rows.max()), math.floor(max(hi, rho) + MATCH_TOL))
    for r in range(hi_int, lo_int - 1, -1):
        if abs(r - rho) > MATCH_TOL:
            continue
        if exact.rank(_shifted(a, r)) < a.shape[0]:
            return TaggedReal(float(r), Fraction(r))
    return TaggedReal(rho, None, RADIUS_TOL)


def eigenspace_at(d, lam) -> list[tuple[int, ...]]:
    """Exact basis of ker(D - lam I); empty iff lam is not an eigenvalue."""
    a = as_matrix(d)
    return [tuple(v) for v in exact.nullspace(_shifted(a, lam))]


def numeric_nullspace(m: np.ndarray, tol: float) -> np.ndarray:
    """Columns spanning the numerical null space (singular values <= tol)."""
    _, s, vh = np.linalg.svd(m)
    scale = max(1.0, float(s[0])) if s.size else 1.0
    null = vh[np.sum(s > tol * scale):]
    return null.T


def _normalize_exact(v) -> tuple[Fraction, ...]:
    total = sum(v)
    return tuple(Fraction(x, total) for x in v)


def _polished_perron(a: np.ndarray, rho: float, guess: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    _, _, vh = np.linalg.svd(a.astype(float) - rho * np.eye(n))
    v = vh[-1]
    if v @ guess < 0:
        v = -v
    v = v / v.sum()
    return v


def perron_data(d) -> SpectralReport:
    a = as_matrix(d)
    if not is_irreducible(a):
        raise PreconditionError("Perron data requires irreducibility")
    radius = spectral_radius(a)
    if radius.is_exact:
        right = eigenspace_at(a, radius.exact)
        left = eigenspace_at(a.T, radius.exact)
        assert len(right) == 1 and len(left) == 1, "Perron eigenspace must be one-dimensional"
        pr, pl = _normalize_exact(right[0]), _normalize_exact(left[0])
        return SpectralReport(radius, True, 1, right, left, pr, pl)
    rho, xr, _, _ = _power_iteration(a)
    _, xl, _, _ = _power_iteration(a.T)
    vr = _polished_perron(a, rho, xr)
    vl = _polished_perron(a.T, rho, xl)
    return SpectralReport(
        radius, True, 1, [tuple(vr)], [tuple(vl)], tuple(float(x) for x in vr), tuple(float(x) for x in vl)
    )


def spectral_report(d) -> SpectralReport:
    """Radius, eigenspaces at the radius, and Perron vectors when irreducible."""
    a = as_matrix(d)
    if is_irreducible(a):
        return perron_data(a)
    radius = spectral_radius(a)
    if radius.is_exact:
        right = eigenspace_at(a, radius.exact)
        left = eigenspace_at(a.T, radius.exact)
    else:
        n = a.shape[0]
        right = [tuple(c) for c in numeric_nullspace(a - radius.value * np.eye(n), PERRON_TOL).T]
        left = [tuple(c) for c in numeric_nullspace(a.T - radius.value * np.eye(n), PERRON_TOL).T]
    return SpectralReport(radius, bool(right), len(right), right, left)


def circulant_spectrum(first_row) -> list[complex]:
    row = list(first_row)
    m = len(row)
    out = [complex(sum(row))]
    for k in range(1, m):
        out.append(sum(d * cmath.exp(2j * math.pi * (j * k % m) / m) for j, d in enumerate(row)))
    return out
