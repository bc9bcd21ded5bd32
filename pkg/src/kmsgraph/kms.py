"""Gauge-dynamics KMS states of graph C*-algebras.

A KMS state is stored as its inverse temperature together with the vector of
values on vertex projections. The inverse temperature is carried as
``lam = exp(beta)`` so exact work never touches a logarithm.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exact
from .errors import GraphError, NotStronglyConnectedError, PreconditionError, SinkError
from .graph import DirectedGraph, PathWord, has_sink, is_strongly_connected, validate_path
from .graph import strongly_connected_components
from .spectral import (
    PERRON_TOL,
    TaggedReal,
    as_matrix,
    fraction_str,
    numeric_nullspace,
    perron_data,
    spectral_radius,
)

MAX_NULLITY = 12
NUMERIC_TOL = 1e-9


@dataclass(frozen=True)
class Beta:
    """Inverse temperature, represented by ``exp(beta)``."""

    exp_exact: Fraction | None
    exp_value: float

    @classmethod
    def from_exp(cls, lam) -> "Beta":
        if isinstance(lam, TaggedReal):
            return cls(lam.exact, float(lam.value))
        if isinstance(lam, (int, Fraction)) and not isinstance(lam, bool):
            lam = Fraction(lam)
            if lam <= 0:
                raise ValueError("exp(beta) must be positive")
            return cls(lam, float(lam))
        lam = float(lam)
        if lam <= 0:
            raise ValueError("exp(beta) must be positive")
        return cls(None, lam)

    @classmethod
    def from_value(cls, beta: float) -> "Beta":
        if beta == 0:
            return cls(Fraction(1), 1.0)
        return cls(None, math.exp(beta))

    @property
    def is_exact(self) -> bool:
        return self.exp_exact is not None

    @property
    def value(self) -> float:
        return math.log(self.exp_value)

    def __str__(self):
        if self.is_exact:
            return f"ln({fraction_str(self.exp_exact)})"
        return f"ln({self.exp_value!r})"

    def to_dict(self) -> dict:
        if self.is_exact:
            return {"log_of": fraction_str(self.exp_exact), "approx": self.value}
        return {"log_of": repr(self.exp_value), "approx": self.value, "exact": False}


@dataclass(frozen=True)
class KmsState:
    beta: Beta
    weights: tuple
    tolerance: float | None = None

    def __post_init__(self):
        w = tuple(self.weights)
        object.__setattr__(self, "weights", w)
        if self.is_exact:
            if any(x < 0 for x in w) or sum(w) != 1:
                raise ValueError("weights must be a probability vector")
        else:
            tol = self.tolerance or NUMERIC_TOL
            object.__setattr__(self, "tolerance", tol)
            if any(x < -tol for x in w) or abs(sum(w) - 1) > tol * max(1, len(w)):
                raise ValueError("weights must be a probability vector")

    @property
    def is_exact(self) -> bool:
        return self.beta.is_exact and all(isinstance(x, (int, Fraction)) for x in self.weights)

    def as_floats(self) -> np.ndarray:
        return np.array([float(x) for x in self.weights])

    def to_dict(self, g: DirectedGraph | None = None) -> dict:
        if self.is_exact:
            weights = [fraction_str(x) for x in self.weights]
        else:
            weights = [float(x) for x in self.weights]
        doc = {"beta": self.beta.to_dict(), "weights": weights}
        if g is not None:
            doc["factors_through"] = factors_through(g, self)
        return doc


@dataclass(frozen=True)
class KmsPolytope:
    beta: Beta
    eigenspace_basis: list
    extreme_points: tuple
    dimension: int
    numeric: bool = False
    warnings: tuple = field(default=())

    @property
    def is_empty(self) -> bool:
        return not self.extreme_points

    def contains(self, g: DirectedGraph, weights) -> bool:
        try:
            state = KmsState(self.beta, tuple(weights))
        except ValueError:
            return False
        return factors_through(g, state)

    def to_dict(self, g: DirectedGraph | None = None) -> dict:
        basis = [[fraction_str(x) if not self.numeric else float(x) for x in v] for v in self.eigenspace_basis]
        return {
            "beta": self.beta.to_dict(),
            "dimension": self.dimension,
            "eigenspace_basis": basis,
            "extreme_points": [p.to_dict(g) for p in self.extreme_points],
            "numeric": self.numeric,
            "warnings": list(self.warnings),
        }


def _require_sink_free(g: DirectedGraph) -> None:
    if has_sink(g):
        raise SinkError("graph has a sink; KMS analysis covers sink-free graphs only")


def _lambda_shift(a: np.ndarray, lam) -> list[list[Fraction]]:
    n = a.shape[0]
    return [[Fraction(int(a[i, j])) - (lam if i == j else 0) for j in range(n)] for i in range(n)]


def _cone_extreme_rays_exact(constraints, m) -> tuple[list, list]:
    """Extreme rays of {x : Cx = 0, x >= 0}, normalized to sum 1.

    Works in coordinates of a kernel basis B (m x d): a ray B c is extreme
    exactly when the rows of B where it vanishes have rank d - 1. Returns
    (basis, sorted extreme rays).
    """
    basis = exact.nullspace(constraints, m) if constraints else exact.nullspace([], m)
    d = len(basis)
    if d == 0:
        return basis, []
    if d > MAX_NULLITY:
        raise PreconditionError(f"eigenspace dimension {d} exceeds the enumeration cap {MAX_NULLITY}")
    rows = [tuple(basis[k][i] for k in range(d)) for i in range(m)]
    directions = []
    seen = set()
    for r in rows:
        if any(r):
            key = tuple(exact.primitive_integer_vector([Fraction(x) for x in r]))
            if key not in seen:
                seen.add(key)
                directions.append(key)
    found = set()
    subsets = itertools.combinations(directions, d - 1) if d > 1 else [()]
    for subset in subsets:
        if d > 1:
            null = exact.nullspace(list(subset), d)
            if len(null) != 1:
                continue
            c = null[0]
        else:
            c = [1]
        v = [sum(r[k] * c[k] for k in range(d)) for r in rows]
        if all(x >= 0 for x in v):
            pass
        elif all(x <= 0 for x in v):
            v = [-x for x in v]
        else:
            continue
        total = sum(v)
        found.add(tuple(Fraction(x, total) for x in v))
    return basis, sorted(found, reverse=True)


def _cone_extreme_rays_numeric(constraints: np.ndarray, m: int, tol: float) -> tuple[list, list]:
    if constraints.size:
        b = numeric_nullspace(constraints, tol)
    else:
        b = np.eye(m)
    d = b.shape[1]
    if d == 0:
        return [], []
    if d > MAX_NULLITY:
        raise PreconditionError(f"eigenspace dimension {d} exceeds the enumeration cap {MAX_NULLITY}")
    directions = []
    for r in b:
        nr = np.linalg.norm(r)
        if nr <= tol:
            continue
        u = r / nr
        if not any(min(np.linalg.norm(u - w), np.linalg.norm(u + w)) <= 1e-7 for w in directions):
            directions.append(u)
    found = []
    subsets = itertools.combinations(directions, d - 1) if d > 1 else [()]
    for subset in subsets:
        if d > 1:
            s = np.array(subset)
            _, sv, vh = np.linalg.svd(s)
            if np.sum(sv > 1e-9) != d - 1:
                continue
            c = vh[-1]
        else:
            c = np.ones(1)
        v = b @ c
        scale = np.abs(v).max()
        if scale <= tol:
            continue
        v = v / scale
        if (v >= -1e-9).all():
            pass
        elif (v <= 1e-9).all():
            v = -v
        else:
            continue
        v = np.where(np.abs(v) <= 1e-9, 0.0, v)
        v = v / v.sum()
        if not any(np.abs(v - w).max() <= 1e-8 for w in found):
            found.append(v)
    found.sort(key=lambda w: tuple(-w))
    return [tuple(col) for col in b.T], found


def _affine_dimension(points) -> int:
    if not points:
        return -1
    arr = np.array([[float(x) for x in p] for p in points])
    if all(isinstance(x, Fraction) for p in points for x in p):
        return exact.rank([list(p) for p in points]) - 1
    return int(np.linalg.matrix_rank(arr, tol=1e-8)) - 1


def polytope_with_constraints(g: DirectedGraph, beta: Beta, extra_rows=()) -> KmsPolytope:
    """KMS polytope at ``beta`` intersected with the linear equalities in
    ``extra_rows`` (each a length-m integer row, meaning row . N = 0)."""
    _require_sink_free(g)
    return _polytope(as_matrix(g), beta, extra_rows)


def _polytope(a: np.ndarray, beta: Beta, extra_rows=()) -> KmsPolytope:
    """Probability vectors N >= 0 with a N = exp(beta) N (no sink check)."""
    m = a.shape[0]
    if beta.is_exact:
        rows = _lambda_shift(a, beta.exp_exact) + [[Fraction(x) for x in r] for r in extra_rows]
        basis, rays = _cone_extreme_rays_exact(rows, m)
        points = tuple(KmsState(beta, r) for r in rays)
        eig = exact.nullspace(_lambda_shift(a, beta.exp_exact))
        return KmsPolytope(beta, [tuple(Fraction(x) for x in v) for v in eig], points, _affine_dimension(rays))
    warn = ("exp(beta) is not rational; numeric fallback",)
    shifted = a.astype(float) - beta.exp_value * np.eye(m)
    stack = np.vstack([shifted] + [np.asarray(r, dtype=float)[None, :] for r in extra_rows])
    _, rays = _cone_extreme_rays_numeric(stack, m, NUMERIC_TOL)
    eig = [tuple(float(x) for x in col) for col in numeric_nullspace(shifted, NUMERIC_TOL).T]
    points = tuple(KmsState(beta, tuple(float(x) for x in r), NUMERIC_TOL) for r in rays)
    return KmsPolytope(beta, eig, points, _affine_dimension(rays), numeric=True, warnings=warn)


def critical_inverse_temperature(g: DirectedGraph) -> Beta:
    _require_sink_free(g)
    return Beta.from_exp(spectral_radius(g))


def kms_simplex(g: DirectedGraph, beta: Beta) -> KmsPolytope:
    """All KMS states at ``beta`` that factor through the graph algebra."""
    return polytope_with_constraints(g, beta)


def unique_kms(g: DirectedGraph) -> KmsState:
    if not is_strongly_connected(g):
        raise NotStronglyConnectedError("graph is not strongly connected; use kms_simplex instead")
    rep = perron_data(g)
    beta = Beta.from_exp(rep.radius)
    if rep.radius.is_exact:
        state = KmsState(beta, rep.perron_right)
    else:
        state = KmsState(beta, rep.perron_right, PERRON_TOL)
    poly = kms_simplex(g, beta)
    assert len(poly.extreme_points) == 1, "KMS polytope of a strongly connected graph must be a point"
    if state.is_exact:
        assert poly.extreme_points[0].weights == state.weights
    else:
        assert np.allclose(poly.extreme_points[0].as_floats(), state.as_floats(), atol=PERRON_TOL, rtol=0)
    return state


@dataclass(frozen=True)
class AdmissibleReport:
    betas: tuple
    certificate: str
    cite: str

    def to_dict(self) -> dict:
        return {"betas": [b.to_dict() for b in self.betas], "certificate": self.certificate, "cite": self.cite}


def admissible_inverse_temperatures(g: DirectedGraph) -> AdmissibleReport:
    """Inverse temperatures at which KMS states factoring through C*(g) exist."""
    _require_sink_free(g)
    a = as_matrix(g)
    radius = spectral_radius(a)
    beta_c = Beta.from_exp(radius)
    # strictly positive left eigenvector at the radius => only ln(rho)
    left = _polytope(a.T, beta_c)
    covered = set()
    for p in left.extreme_points:
        covered.update(i for i, x in enumerate(p.weights) if (x > 0 if p.is_exact else x > NUMERIC_TOL))
    if len(covered) == a.shape[0]:
        return AdmissibleReport((beta_c,), "Lemma onetemp", "strictly positive left eigenvector at rho(D)")
    # A nonnegative eigenvector belongs to the Perron root of some
    # strongly connected block, so those roots are the only candidates.
    candidates = {}
    for comp in strongly_connected_components(g):
        sub = a[np.ix_(comp, comp)]
        if len(comp) == 1 and sub[0, 0] == 0:
            continue
        r = spectral_radius(sub)
        key = r.exact if r.is_exact else round(r.value, 9)
        candidates.setdefault(key, Beta.from_exp(r))
    betas = [b for b in candidates.values() if not kms_simplex(g, b).is_empty]
    betas.sort(key=lambda b: b.exp_value)
    return AdmissibleReport(tuple(betas), "Prop 2.1(c) enumeration", "eigenvalues with a nonnegative eigenvector")


def _same_word(mu: PathWord, nu: PathWord) -> bool:
    if mu.edge_ids or nu.edge_ids:
        return mu.edge_ids == nu.edge_ids
    return mu.anchor == nu.anchor


def evaluate_state(g: DirectedGraph, state: KmsState, mu: PathWord, nu: PathWord):
    """Value of the state on S_mu S_nu^*."""
    for w in (mu, nu):
        ok, _, _ = validate_path(g, w)
        if not ok:
            raise GraphError(f"{w} is not a path")
    if len(state.weights) != g.vertex_count:
        raise GraphError("state and graph have different vertex counts")
    if not _same_word(mu, nu):
        return Fraction(0) if state.is_exact else 0.0
    _, _, target = validate_path(g, mu)
    n_t = state.weights[target]
    if state.is_exact:
        return Fraction(n_t) / state.beta.exp_exact ** len(mu)
    return float(n_t) * math.exp(-state.beta.value * len(mu))


def _dn(g: DirectedGraph, state: KmsState):
    a = as_matrix(g)
    if len(state.weights) != a.shape[0]:
        raise GraphError("state and graph have different vertex counts")
    if state.is_exact:
        w = state.weights
        return [sum((int(a[i, j]) * w[j] for j in range(len(w)) if a[i, j]), Fraction(0)) for i in range(len(w))]
    return list(a.astype(float) @ state.as_floats())


def check_toeplitz_subinvariance(g: DirectedGraph, state: KmsState) -> bool:
    dn = _dn(g, state)
    if state.is_exact:
        lam = state.beta.exp_exact
        return all(x <= lam * n for x, n in zip(dn, state.weights))
    lam = state.beta.exp_value
    tol = state.tolerance or NUMERIC_TOL
    return all(x <= lam * float(n) + tol for x, n in zip(dn, state.weights))


def factors_through(g: DirectedGraph, state: KmsState) -> bool:
    dn = _dn(g, state)
    if state.is_exact:
        lam = state.beta.exp_exact
        return all(x == lam * n for x, n in zip(dn, state.weights))
    lam = state.beta.exp_value
    tol = state.tolerance or NUMERIC_TOL
    return all(abs(x - lam * float(n)) <= tol * max(1.0, lam) for x, n in zip(dn, state.weights))
