"""Sound verdicts on quantum vertex transitivity and quantum-invariant KMS states.

The quantum automorphism group is never represented. Each verdict comes from
a rule that is licensed by a known theorem, and every rule that fires is
recorded with its citation.

Rules, applied in order:

R1  vertex transitive (classically)                    -> certified
R2  union of two quantum isomorphic certified graphs   -> certified
R3  strongly connected with non-constant Perron vector -> refuted
R4  stable pair colouring has more than one vertex cell -> refuted
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import GraphError, NotStronglyConnectedError
from .graph import DirectedGraph, disjoint_union, is_strongly_connected
from .kms import KmsPolytope, KmsState, factors_through, unique_kms
from .symmetry import (
    AutomorphismGroup,
    automorphism_group,
    invariant_kms_subpolytope,
    is_vertex_transitive,
    orbit_equalities,
    restrict_polytope,
)

CERTIFIED = "certified_qvt"
REFUTED = "refuted_qvt"
UNKNOWN = "unknown"

CITES = {
    "R1": "Remark qvertex",
    "R2": "Lemma qvt; Corollary qvt1",
    "R3": "Prop erg; Prop ergodic",
    "R4": "stable colouring is coarser than quantum orbits",
}


@dataclass(frozen=True)
class CoherentPartition:
    vertex_cells: tuple
    pair_color_count: int
    rounds: int
    color_counts: tuple = ()
    pair_colors: np.ndarray | None = field(default=None, compare=False, repr=False)


def _relabel(keys: np.ndarray) -> tuple[np.ndarray, int]:
    _, inv = np.unique(keys, axis=0, return_inverse=True)
    inv = np.asarray(inv).reshape(-1)
    return inv, int(inv.max()) + 1


def coherent_partition(g: DirectedGraph) -> CoherentPartition:
    """Stable colouring of ordered vertex pairs.

    Pair (i, j) starts with colour (i == j, D[i][j], D[j][i]); each round it
    is recoloured by its old colour and the multiset over k of the colour
    pair (c(i, k), c(k, j)). Stops at the first round that splits nothing.
    """
    a = np.asarray(g.matrix)
    m = g.vertex_count
    init = np.eye(m, dtype=np.int64) * 4 + a * 2 + a.T
    flat, k = _relabel(init.reshape(-1, 1))
    colors = flat.reshape(m, m)
    counts = [k]
    rounds = 0
    while rounds < m * m:
        rounds += 1
        sig = np.empty((m, m, m + 1), dtype=np.int64)
        sig[:, :, 0] = colors
        for i in range(m):
            # rows indexed by k, columns by j
            walk = colors[i, :][:, None] * k + colors
            sig[i, :, 1:] = np.sort(walk, axis=0).T
        flat, new_k = _relabel(sig.reshape(m * m, m + 1))
        if new_k == k:
            break
        colors = flat.reshape(m, m)
        k = new_k
        counts.append(k)
    diag = np.diag(colors)
    cells = {}
    for v in range(m):
        cells.setdefault(int(diag[v]), []).append(v)
    vertex_cells = tuple(tuple(cells[c]) for c in sorted(cells))
    return CoherentPartition(vertex_cells, k, rounds, tuple(counts), colors)


@dataclass(frozen=True)
class QuantumContext:
    """Facts the caller vouches for: ``graph`` is the disjoint union of
    ``first`` and ``second``, which are quantum isomorphic."""

    first: DirectedGraph
    second: DirectedGraph
    quantum_isomorphic: bool = True
    cite: str = "asserted by caller"


@dataclass(frozen=True)
class QSymVerdict:
    status: str
    provenance: tuple = ()

    def to_dict(self) -> dict:
        return {"status": self.status, "provenance": [dict(p) for p in self.provenance]}


def _entry(rule: str, detail: str, extra_cite: str | None = None) -> dict:
    cite = CITES[rule] if extra_cite is None else f"{CITES[rule]}; {extra_cite}"
    return {"rule": rule, "cite": cite, "detail": detail}


def _r1(g, group=None):
    group = group or automorphism_group(g)
    if is_vertex_transitive(group):
        return _entry("R1", "automorphism group has a single vertex orbit")
    return None


def _is_union_of(g: DirectedGraph, g1: DirectedGraph, g2: DirectedGraph) -> bool:
    u = disjoint_union(g1, g2)
    return u.vertex_count == g.vertex_count and set(u.edges) == set(g.edges)


def _r2(g, context: QuantumContext | None):
    if context is None or not context.quantum_isomorphic:
        return None
    if not _is_union_of(g, context.first, context.second):
        return None
    if qvt_verdict(context.first).status == CERTIFIED and qvt_verdict(context.second).status == CERTIFIED:
        return _entry("R2", "components are quantum isomorphic and each certified", context.cite)
    return None


def _r3(g):
    if not is_strongly_connected(g):
        return None
    # The Perron vector is constant exactly when D * 1 is a multiple of 1,
    # i.e. all row sums agree; this keeps the test exact.
    if len(set(g.out_degrees())) > 1:
        return _entry("R3", "strongly connected and Perron vector is not constant")
    return None


def _r4(g, partition=None):
    partition = partition or coherent_partition(g)
    if len(partition.vertex_cells) > 1:
        return _entry("R4", f"{len(partition.vertex_cells)} stable vertex cells")
    return None


def rule_outcomes(g: DirectedGraph, context: QuantumContext | None = None, group=None) -> dict:
    """Evaluate every rule independently (for soundness audits)."""
    return {"R1": _r1(g, group), "R2": _r2(g, context), "R3": _r3(g), "R4": _r4(g)}


def qvt_verdict(g: DirectedGraph, context: QuantumContext | None = None, group=None) -> QSymVerdict:
    hit = _r1(g, group)
    if hit:
        return QSymVerdict(CERTIFIED, (hit,))
    hit = _r2(g, context)
    if hit:
        return QSymVerdict(CERTIFIED, (hit,))
    hit = _r3(g)
    if hit:
        return QSymVerdict(REFUTED, (hit,))
    hit = _r4(g)
    if hit:
        return QSymVerdict(REFUTED, (hit,))
    return QSymVerdict(UNKNOWN, ())


@dataclass(frozen=True)
class QuantumInvariantReport:
    status: str  # "exact", "necessary_condition" or "undetermined beyond (i)"
    always_invariant: KmsState | None
    states: tuple
    provenance: tuple

    def to_dict(self, g: DirectedGraph | None = None) -> dict:
        return {
            "status": self.status,
            "always_invariant": None if self.always_invariant is None else self.always_invariant.to_dict(g),
            "states": [s.to_dict(g) for s in self.states],
            "provenance": [dict(p) for p in self.provenance],
        }


def _uniform_state(g: DirectedGraph, polytope: KmsPolytope) -> KmsState | None:
    m = g.vertex_count
    if polytope.beta.is_exact:
        state = KmsState(polytope.beta, tuple(Fraction(1, m) for _ in range(m)))
    else:
        state = KmsState(polytope.beta, tuple(1.0 / m for _ in range(m)))
    return state if factors_through(g, state) else None


def quantum_invariant_kms(
    g: DirectedGraph,
    polytope: KmsPolytope,
    verdict: QSymVerdict,
    asserted_orbits=None,
    group: AutomorphismGroup | None = None,
) -> QuantumInvariantReport:
    """Which KMS states in ``polytope`` are preserved by the quantum
    automorphism group, as far as the available theorems decide."""
    m = g.vertex_count
    if polytope.eigenspace_basis and len(polytope.eigenspace_basis[0]) != m:
        raise GraphError("polytope and graph have different vertex counts")
    uniform = _uniform_state(g, polytope)
    base = ({"rule": "uniform", "cite": "Remark future; Prop stateprojection",
             "detail": "constant weights are preserved unconditionally"},)
    if is_strongly_connected(g):
        prov = base + ({"rule": "strongly_connected", "cite": "Prop statepreserve",
                        "detail": "the unique KMS state is preserved"},)
        return QuantumInvariantReport("exact", uniform, tuple(polytope.extreme_points), prov)
    if verdict.status == CERTIFIED:
        prov = base + tuple(verdict.provenance) + (
            {"rule": "qvt_forces_constant", "cite": "Lemma vertextransitive",
             "detail": "all u_ij nonzero, so preserved weights are constant"},)
        return QuantumInvariantReport("exact", uniform, (uniform,) if uniform else (), prov)
    if asserted_orbits is not None:
        group = group or automorphism_group(g)
        classical = invariant_kms_subpolytope(group, polytope)
        narrowed = restrict_polytope(classical, orbit_equalities(asserted_orbits, m))
        prov = base + ({"rule": "asserted_orbits", "cite": "Lemma vertextransitive",
                        "detail": "preserved weights are constant on quantum orbits (necessary only)"},)
        return QuantumInvariantReport("necessary_condition", uniform, tuple(narrowed.extreme_points), prov)
    return QuantumInvariantReport("undetermined beyond (i)", uniform, (uniform,) if uniform else (), base)


@dataclass(frozen=True)
class StronglyConnectedReport:
    state: KmsState
    quantum_invariant: bool
    ergodicity: str  # "non-ergodic" or "undetermined"
    provenance: tuple

    def to_dict(self, g: DirectedGraph | None = None) -> dict:
        return {
            "state": self.state.to_dict(g),
            "quantum_invariant": self.quantum_invariant,
            "ergodicity": self.ergodicity,
            "provenance": [dict(p) for p in self.provenance],
        }


def strongly_connected_quantum_report(g: DirectedGraph) -> StronglyConnectedReport:
    if not is_strongly_connected(g):
        raise NotStronglyConnectedError("graph is not strongly connected")
    state = unique_kms(g)
    prov = [{"rule": "strongly_connected", "cite": "Prop statepreserve",
             "detail": "quantum automorphism group preserves the unique KMS state"}]
    r3 = _r3(g)
    if r3:
        prov.append(r3)
        ergodicity = "non-ergodic"
    else:
        ergodicity = "undetermined"
    return StronglyConnectedReport(state, True, ergodicity, tuple(prov))
