"""Classical graph automorphisms and invariance of KMS states.

Automorphisms are found by individualization-refinement: ordered partitions
are refined to equitable ones (counting out- and in-neighbours in every
cell), and a backtracking search over individualized vertices compares
refinement traces against the first (leftmost) path of the search tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exact
from .errors import GraphError, PreconditionError
from .graph import DirectedGraph, disjoint_union
from .kms import (
    NUMERIC_TOL,
    KmsPolytope,
    KmsState,
    _affine_dimension,
    _cone_extreme_rays_exact,
    _cone_extreme_rays_numeric,
)
from .permgroup import StabilizerChain, orbit_of, orbits
from .spectral import numeric_nullspace


@dataclass(frozen=True)
class AutomorphismGroup:
    vertex_count: int
    generators: tuple
    orbits: tuple
    order: int | None = None
    base: tuple = ()

    def to_dict(self) -> dict:
        return {
            "generators": [list(g) for g in self.generators],
            "orbits": [list(o) for o in self.orbits],
            "order": None if self.order is None else str(self.order),
        }


class _Refiner:
    def __init__(self, a: np.ndarray):
        self.a = a
        self.n = a.shape[0]

    def refine(self, cells):
        """Refine an ordered partition to the coarsest equitable refinement.
        Returns (cells, trace); both are equivariant under relabelling."""
        a = self.a
        trace = []
        while True:
            k = len(cells)
            ind = np.zeros((self.n, k), dtype=np.int64)
            for ci, cell in enumerate(cells):
                ind[cell, ci] = 1
            sig = np.concatenate([a @ ind, a.T @ ind], axis=1)
            new_cells = []
            rnd = []
            for cell in cells:
                if len(cell) == 1:
                    new_cells.append(cell)
                    rnd.append(sig[cell[0]].tobytes())
                    continue
                groups = {}
                for v in cell:
                    groups.setdefault(sig[v].tobytes(), []).append(v)
                for key in sorted(groups):
                    new_cells.append(groups[key])
                    rnd.append((key, len(groups[key])))
            trace.append(tuple(rnd))
            if len(new_cells) == k:
                return new_cells, tuple(trace)
            cells = new_cells

    def root(self):
        loops = np.diag(self.a)
        cells = [[v for v in range(self.n) if loops[v] == x] for x in sorted(set(loops.tolist()))]
        return self.refine(cells)

    def individualize(self, cells, v):
        out = []
        for cell in cells:
            if v in cell:
                out.append([v])
                rest = [w for w in cell if w != v]
                if rest:
                    out.append(rest)
            else:
                out.append(cell)
        return self.refine(out)


def _target_cell(cells) -> int | None:
    best = None
    for i, c in enumerate(cells):
        if len(c) > 1 and (best is None or len(c) < len(cells[best])):
            best = i
    return best


class _Node:
    __slots__ = ("cells", "trace", "target")

    def __init__(self, cells, trace):
        self.cells = cells
        self.trace = trace
        self.target = _target_cell(cells)


def _leftmost_path(ref: _Refiner) -> list[_Node]:
    path = [_Node(*ref.root())]
    while path[-1].target is not None:
        node = path[-1]
        v = min(node.cells[node.target])
        path.append(_Node(*ref.individualize(node.cells, v)))
    return path


def _leaf_map(leaf_cells, ref_leaf_cells) -> tuple:
    """Permutation sending the reference leaf to this leaf, cell by cell."""
    perm = [0] * len(leaf_cells)
    for c_ref, c in zip(ref_leaf_cells, leaf_cells):
        perm[c_ref[0]] = c[0]
    return tuple(perm)


def _preserves(a_src: np.ndarray, a_dst: np.ndarray, perm) -> bool:
    p = np.asarray(perm)
    return bool(np.array_equal(a_dst[np.ix_(p, p)], a_src))


def _search(ref: _Refiner, path: list[_Node], cells, depth: int, a_src: np.ndarray, fixed_top=None):
    """Depth-first search below a node at ``depth`` whose trace already
    matches ``path[depth]``. Returns the first adjacency-preserving leaf map
    from path[-1] to a leaf here, or None."""
    ref_node = path[depth]
    if ref_node.target is None:
        perm = _leaf_map(cells, path[-1].cells)
        return perm if _preserves(a_src, ref.a, perm) else None
    cell = cells[ref_node.target]
    candidates = cell if fixed_top is None else [w for w in cell if w in fixed_top]
    for w in candidates:
        child_cells, trace = ref.individualize(cells, w)
        if trace != path[depth + 1].trace:
            continue
        found = _search(ref, path, child_cells, depth + 1, a_src)
        if found is not None:
            return found
    return None


def _search_generators(a: np.ndarray):
    ref = _Refiner(a)
    path = _leftmost_path(ref)
    base = [min(node.cells[node.target]) for node in path[:-1]]
    gens = []
    for level in range(len(base) - 1, -1, -1):
        node = path[level]
        b = base[level]
        failed = []
        for v in sorted(node.cells[node.target]):
            if v == b:
                continue
            current = orbit_of(b, gens)
            if v in current or any(v in orbit_of(f, gens) for f in failed):
                continue
            child_cells, trace = ref.individualize(node.cells, v)
            perm = None
            if trace == path[level + 1].trace:
                perm = _search(ref, path, child_cells, level + 1, a)
            if perm is None:
                failed.append(v)
            else:
                gens.append(perm)
    return gens, base


def automorphism_group(g: DirectedGraph, compute_order: bool = True) -> AutomorphismGroup:
    a = np.asarray(g.matrix)
    gens, base = _search_generators(a)
    order = StabilizerChain(gens, g.vertex_count).order() if compute_order else None
    return AutomorphismGroup(
        g.vertex_count, tuple(gens), tuple(tuple(o) for o in orbits(gens, g.vertex_count)), order, tuple(base)
    )


def are_isomorphic(g1: DirectedGraph, g2: DirectedGraph):
    """A vertex bijection p with D2[p(i)][p(j)] == D1[i][j], or None."""
    if g1.vertex_count != g2.vertex_count or g1.edge_count != g2.edge_count:
        return None
    a1 = np.asarray(g1.matrix)
    a2 = np.asarray(g2.matrix)
    if sorted(g1.out_degrees()) != sorted(g2.out_degrees()) or sorted(g1.in_degrees()) != sorted(g2.in_degrees()):
        return None
    path = _leftmost_path(_Refiner(a1))
    ref2 = _Refiner(a2)
    cells, trace = ref2.root()
    if trace != path[0].trace:
        return None
    # one branch per Aut(g2)-orbit suffices at the top of the tree
    top = None
    if path[0].target is not None:
        gens2, _ = _search_generators(a2)
        reps = set()
        seen = set()
        for v in sorted(cells[path[0].target]):
            if v not in seen:
                reps.add(v)
                seen |= orbit_of(v, gens2)
        top = reps
    return _search(ref2, path, cells, 0, a1, fixed_top=top)


def is_vertex_transitive(group: AutomorphismGroup) -> bool:
    return len(group.orbits) == 1


def _check_dims(group: AutomorphismGroup, n: int) -> None:
    if group.vertex_count != n:
        raise GraphError(f"group acts on {group.vertex_count} vertices, state has {n}")


def is_state_invariant(group: AutomorphismGroup, state: KmsState) -> bool:
    w = state.weights
    _check_dims(group, len(w))
    if state.is_exact:
        return all(w[s[i]] == w[i] for s in group.generators for i in range(len(w)))
    tol = state.tolerance or NUMERIC_TOL
    return all(abs(float(w[s[i]]) - float(w[i])) <= tol for s in group.generators for i in range(len(w)))


def orbit_equalities(partition, n: int) -> list[list[int]]:
    """Rows e_first - e_other for every orbit, so that row . N = 0 means N is
    constant on each orbit."""
    rows = []
    for cell in partition:
        first = cell[0]
        for v in cell[1:]:
            r = [0] * n
            r[first], r[v] = 1, -1
            rows.append(r)
    return rows


def restrict_polytope(polytope: KmsPolytope, extra_rows) -> KmsPolytope:
    """Intersect a KMS polytope with the equalities ``row . N = 0``, working
    inside the polytope's own eigenspace."""
    basis = polytope.eigenspace_basis
    beta = polytope.beta
    if not basis:
        return polytope
    m = len(basis[0])
    if not polytope.numeric:
        # complement of span(basis), as equations
        complement = exact.nullspace([list(v) for v in basis], m)
        rows = [[Fraction(x) for x in r] for r in complement] + [[Fraction(x) for x in r] for r in extra_rows]
        _, rays = _cone_extreme_rays_exact(rows, m)
        points = tuple(KmsState(beta, r) for r in rays)
        return KmsPolytope(beta, basis, points, _affine_dimension(rays), False, polytope.warnings)
    b = np.array([[float(x) for x in v] for v in basis])
    complement = numeric_nullspace(b, NUMERIC_TOL).T
    stack = np.vstack([complement] + [np.asarray(r, dtype=float)[None, :] for r in extra_rows]) if (
        complement.size or extra_rows
    ) else np.zeros((0, m))
    _, rays = _cone_extreme_rays_numeric(stack, m, NUMERIC_TOL)
    points = tuple(KmsState(beta, tuple(float(x) for x in r), NUMERIC_TOL) for r in rays)
    return KmsPolytope(beta, basis, points, _affine_dimension(rays), True, polytope.warnings)


def invariant_kms_subpolytope(group: AutomorphismGroup, polytope: KmsPolytope) -> KmsPolytope:
    """KMS states of ``polytope`` fixed by every automorphism in ``group``."""
    if polytope.eigenspace_basis:
        _check_dims(group, len(polytope.eigenspace_basis[0]))
    return restrict_polytope(polytope, orbit_equalities(group.orbits, group.vertex_count))


def _weakly_connected(g: DirectedGraph) -> bool:
    adj = [set() for _ in range(g.vertex_count)]
    for s, t in g.edges:
        adj[s].add(t)
        adj[t].add(s)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in adj[v] - seen:
            seen.add(w)
            stack.append(w)
    return len(seen) == g.vertex_count


def verify_union_aut_product(g1: DirectedGraph, g2: DirectedGraph) -> bool:
    """Check Aut(g1 u g2) = Aut(g1) x Aut(g2) for connected, non-isomorphic
    components: equal orders and block-diagonal generators."""
    if not (_weakly_connected(g1) and _weakly_connected(g2)):
        raise PreconditionError("both components must be connected")
    if are_isomorphic(g1, g2) is not None:
        raise PreconditionError("components are isomorphic")
    n1 = g1.vertex_count
    union = automorphism_group(disjoint_union(g1, g2))
    o1 = automorphism_group(g1).order
    o2 = automorphism_group(g2).order
    block = all((s[i] < n1) == (i < n1) for s in union.generators for i in range(union.vertex_count))
    return block and union.order == o1 * o2
