"""Finite directed graphs without multiple edges.

Vertices are the integers ``0 .. m-1``. Edges keep the order in which they
were given, because path words refer to edges by position.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import GraphError


@dataclass(frozen=True)
class DirectedGraph:
    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    vertex_labels: tuple[str, ...] | None = field(default=None, compare=False)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Vertex matrix D (read-only int64 array)."""
        d = np.zeros((self.vertex_count, self.vertex_count), dtype=np.int64)
        for s, t in self.edges:
            d[s, t] = 1
        d.setflags(write=False)
        return d

    @cached_property
    def successors(self) -> tuple[tuple[int, ...], ...]:
        out = [[] for _ in range(self.vertex_count)]
        for s, t in self.edges:
            out[s].append(t)
        return tuple(tuple(sorted(x)) for x in out)

    @cached_property
    def out_edges(self) -> tuple[tuple[int, ...], ...]:
        """Edge ids leaving each vertex, in edge order."""
        out = [[] for _ in range(self.vertex_count)]
        for k, (s, _) in enumerate(self.edges):
            out[s].append(k)
        return tuple(tuple(x) for x in out)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def out_degrees(self) -> list[int]:
        return [int(x) for x in self.matrix.sum(axis=1)]

    def in_degrees(self) -> list[int]:
        return [int(x) for x in self.matrix.sum(axis=0)]

    def label(self, v: int) -> str:
        if self.vertex_labels is not None:
            return self.vertex_labels[v]
        return str(v)

    def to_dict(self) -> dict:
        doc = {"m": self.vertex_count, "edges": [list(e) for e in sorted(self.edges)]}
        if self.vertex_labels is not None:
            doc["labels"] = list(self.vertex_labels)
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, doc: dict) -> "DirectedGraph":
        if not isinstance(doc, dict) or "m" not in doc or "edges" not in doc:
            raise GraphError("graph document needs fields 'm' and 'edges'")
        m = doc["m"]
        if not isinstance(m, int) or isinstance(m, bool):
            raise GraphError("field 'm' must be an integer")
        edges = []
        for e in doc["edges"]:
            if not isinstance(e, (list, tuple)) or len(e) != 2:
                raise GraphError(f"edge {e!r} is not a [source, target] pair")
            edges.append((e[0], e[1]))
        return build_graph(m, edges, labels=doc.get("labels"))


def load_graph(path) -> DirectedGraph:
    with open(Path(path), encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GraphError(f"{path}: invalid JSON ({exc})") from exc
    return DirectedGraph.from_dict(doc)


def save_graph(g: DirectedGraph, path) -> None:
    Path(path).write_text(g.to_json() + "\n", encoding="utf-8")


def build_graph(m, edges, labels=None) -> DirectedGraph:
    """Validated graph. Edges are stored sorted, so edge ids are the
    positions in lexicographic (source, target) order."""
    if not isinstance(m, (int, np.integer)) or isinstance(m, bool) or m < 1:
        raise GraphError(f"vertex count must be a positive integer, got {m!r}")
    m = int(m)
    seen = set()
    clean = []
    for e in edges:
        s, t = e
        for x in (s, t):
            if not isinstance(x, (int, np.integer)) or isinstance(x, bool) or not 0 <= x < m:
                raise GraphError(f"edge ({s}, {t}): endpoint {x!r} out of range [0, {m})")
        pair = (int(s), int(t))
        if pair in seen:
            raise GraphError(f"duplicate edge {pair}")
        seen.add(pair)
        clean.append(pair)
    if labels is not None:
        labels = tuple(str(x) for x in labels)
        if len(labels) != m:
            raise GraphError(f"expected {m} labels, got {len(labels)}")
    return DirectedGraph(m, tuple(sorted(clean)), labels)


def orient(undirected_edges, m, labels=None) -> DirectedGraph:
    """Directed graph with both (i, j) and (j, i) for every undirected edge."""
    directed = set()
    for e in undirected_edges:
        i, j = tuple(e) if len(e) == 2 else (next(iter(e)),) * 2
        if (i, j) in directed:
            raise GraphError(f"duplicate edge {{{i}, {j}}}")
        directed.add((i, j))
        directed.add((j, i))
    return build_graph(m, sorted(directed), labels=labels)


def has_sink(g: DirectedGraph) -> bool:
    return any(len(s) == 0 for s in g.successors)


def _reachable(g: DirectedGraph, start: int, reverse=False) -> set[int]:
    if reverse:
        adj = [[] for _ in range(g.vertex_count)]
        for s, t in g.edges:
            adj[t].append(s)
    else:
        adj = g.successors
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def is_strongly_connected(g: DirectedGraph) -> bool:
    """Every ordered vertex pair is joined by a path of positive length.

    For m >= 2 this is plain strong connectivity. A single vertex counts only
    when it carries a loop, matching irreducibility of the 1x1 vertex matrix.
    """
    if g.vertex_count == 1:
        return bool(g.matrix[0, 0])
    everything = set(range(g.vertex_count))
    return _reachable(g, 0) == everything and _reachable(g, 0, reverse=True) == everything


def strongly_connected_components(g: DirectedGraph) -> list[list[int]]:
    """Tarjan's algorithm, iterative. Components come out in reverse
    topological order; vertices inside each component are sorted."""
    index = {}
    low = {}
    on_stack = set()
    stack = []
    comps = []
    counter = 0
    for root in range(g.vertex_count):
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            succ = g.successors[v]
            recurse = False
            while i < len(succ):
                w = succ[i]
                i += 1
                if w not in index:
                    work.append((v, i))
                    work.append((w, 0))
                    recurse = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return comps


def make_circulant(first_row) -> DirectedGraph:
    row = list(first_row)
    m = len(row)
    if m == 0:
        raise GraphError("circulant first row must be non-empty")
    for x in row:
        if x not in (0, 1):
            raise GraphError(f"circulant entries must be 0 or 1 (no multiple edges), got {x!r}")
    if not any(row):
        raise GraphError("trivial circulant graph has a sink")
    edges = [(i, j) for i in range(m) for j in range(m) if row[(j - i) % m]]
    return build_graph(m, edges)


def disjoint_union(g1: DirectedGraph, g2: DirectedGraph) -> DirectedGraph:
    off = g1.vertex_count
    edges = list(g1.edges) + [(s + off, t + off) for s, t in g2.edges]
    labels = None
    if g1.vertex_labels is not None or g2.vertex_labels is not None:
        labels = [g1.label(v) for v in range(g1.vertex_count)]
        labels += [g2.label(v) for v in range(g2.vertex_count)]
    return build_graph(off + g2.vertex_count, edges, labels=labels)


@dataclass(frozen=True)
class PathWord:
    """A finite path given by edge ids. The empty word needs an anchor vertex
    and then stands for the vertex projection at that anchor."""

    edge_ids: tuple[int, ...] = ()
    anchor: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "edge_ids", tuple(int(e) for e in self.edge_ids))
        if not self.edge_ids and self.anchor is None:
            raise GraphError("empty path word needs an anchor vertex")

    def __len__(self):
        return len(self.edge_ids)

    @classmethod
    def at(cls, v: int) -> "PathWord":
        return cls((), v)

    def extend(self, edge_id: int) -> "PathWord":
        return PathWord(self.edge_ids + (edge_id,))


def validate_path(g: DirectedGraph, w: PathWord) -> tuple[bool, int | None, int | None]:
    """Return ``(valid, source, target)``. Source and target come from the
    first and last edge even when the word does not compose."""
    if not w.edge_ids:
        if not 0 <= w.anchor < g.vertex_count:
            raise GraphError(f"anchor vertex {w.anchor} out of range")
        return True, w.anchor, w.anchor
    for e in w.edge_ids:
        if not 0 <= e < g.edge_count:
            raise GraphError(f"edge id {e} out of range [0, {g.edge_count})")
    valid = all(g.edges[a][1] == g.edges[b][0] for a, b in zip(w.edge_ids, w.edge_ids[1:]))
    if w.anchor is not None and w.anchor != g.edges[w.edge_ids[0]][0]:
        valid = False
    return valid, g.edges[w.edge_ids[0]][0], g.edges[w.edge_ids[-1]][1]


def paths_from(g: DirectedGraph, v: int, length: int) -> list[PathWord]:
    """All paths of exactly ``length`` edges starting at ``v``."""
    words = [PathWord.at(v)]
    for _ in range(length):
        nxt = []
        for w in words:
            end = g.edges[w.edge_ids[-1]][1] if w.edge_ids else w.anchor
            nxt.extend(PathWord(w.edge_ids + (e,)) for e in g.out_edges[end])
        words = nxt
    return words
