"""Independent reference implementations used only by the tests.

Nothing here imports the search or refinement code under test; the
oracles are brute force, numpy eigen-solvers, or networkx.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from kmsgraph import DirectedGraph, build_graph


@lru_cache(maxsize=None)
def all_perms(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)


def brute_automorphisms(a: np.ndarray) -> list[tuple]:
    """Every permutation p with a[p][:, p] == a."""
    n = a.shape[0]
    perms = all_perms(n)
    permuted = a[perms[:, :, None], perms[:, None, :]]
    keep = (permuted == a[None]).all(axis=(1, 2))
    return [tuple(int(x) for x in p) for p in perms[keep]]


def brute_orbits(auts, n: int) -> list[list[int]]:
    cells = {tuple(sorted({p[v] for p in auts})) for v in range(n)}
    return [list(c) for c in sorted(cells)]


def brute_strongly_connected(a: np.ndarray) -> bool:
    """Irreducibility via (I + A)^(n-1) > 0, the textbook criterion; a single
    vertex needs a loop to count as strongly connected."""
    n = a.shape[0]
    if n == 1:
        return bool(a[0, 0])
    r = np.linalg.matrix_power((np.eye(n, dtype=np.int64) + (a > 0)).astype(np.int64), n - 1)
    return bool((r > 0).all())


def numeric_radius(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(a.astype(float)))))


def graph_from_bits(n: int, bits: int, loops: bool) -> DirectedGraph:
    slots = [(i, j) for i in range(n) for j in range(n) if loops or i != j]
    edges = [slots[k] for k in range(len(slots)) if bits >> k & 1]
    return build_graph(n, edges)


def _canonical_codes(n: int, loops: bool) -> np.ndarray:
    """Smallest code over all relabellings for every adjacency pattern."""
    slots = [(i, j) for i in range(n) for j in range(n) if loops or i != j]
    k = len(slots)
    index = {s: t for t, s in enumerate(slots)}
    perms = all_perms(n)
    # moved[p, t] = slot index that slot t lands on under p
    moved = np.array([[index[(p[i], p[j])] for (i, j) in slots] for p in perms], dtype=np.int64)
    codes = np.arange(1 << k, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(k)) & 1
    best = codes.copy()
    weights = np.int64(1) << moved  # (perm, slot)
    for row in weights:
        best = np.minimum(best, bits @ row)
    return best


def exhaustive_corpus(max_loops_n: int = 4, loopless_n: int = 5) -> list[DirectedGraph]:
    """One representative per isomorphism class: all digraphs (loops
    allowed) on 1..max_loops_n vertices and loopless digraphs on
    loopless_n vertices."""
    out = []
    for n in range(1, max_loops_n + 1):
        for code in np.unique(_canonical_codes(n, True)):
            out.append(graph_from_bits(n, int(code), True))
    if loopless_n:
        for code in np.unique(_canonical_codes(loopless_n, False)):
            out.append(graph_from_bits(loopless_n, int(code), False))
    return out


def random_graph(rng: np.random.Generator, n: int, p: float = 0.35, loops: bool = True) -> DirectedGraph:
    a = rng.random((n, n)) < p
    if not loops:
        np.fill_diagonal(a, False)
    return build_graph(n, [(int(i), int(j)) for i, j in zip(*np.nonzero(a))])


def random_strongly_connected(rng: np.random.Generator, n: int, p: float = 0.3) -> DirectedGraph:
    """A random Hamiltonian cycle plus random extra edges."""
    order = rng.permutation(n)
    edges = {(int(order[i]), int(order[(i + 1) % n])) for i in range(n)}
    extra = rng.random((n, n)) < p
    edges |= {(int(i), int(j)) for i, j in zip(*np.nonzero(extra))}
    return build_graph(n, sorted(edges))
