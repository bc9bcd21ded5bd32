"""Linear binary constraint systems and their game graphs.

Text grammar, one constraint per line::

    x1 + x2 + x3 = 0     # comment

Variables are written 1-based and stored 0-based.
"""

from __future__ import annotations

import itertools
import re
import warnings
from dataclasses import dataclass

from .errors import GraphError, ParseError
from .graph import DirectedGraph, orient

MAX_SUPPORT = 20

_TOKEN = re.compile(r"\s*(?:(?P<var>x(?P<idx>\d+))|(?P<plus>\+)|(?P<eq>=)|(?P<num>\d+)|(?P<bad>\S))")


@dataclass(frozen=True)
class LinearBinarySystem:
    variable_count: int
    constraints: tuple  # of (support: tuple[int, ...], rhs: int)

    def __post_init__(self):
        cons = []
        for support, rhs in self.constraints:
            support = tuple(sorted(support))
            if not support:
                raise ValueError("constraint support must be non-empty")
            if len(set(support)) != len(support):
                raise ValueError("repeated variable in a constraint")
            if support[0] < 0 or support[-1] >= self.variable_count:
                raise ValueError("variable index out of range")
            if rhs not in (0, 1):
                raise ValueError("right-hand side must be 0 or 1")
            cons.append((support, int(rhs)))
        object.__setattr__(self, "constraints", tuple(cons))


@dataclass(frozen=True)
class ConstraintVertex:
    constraint_index: int
    assignment: tuple  # bits, aligned with the sorted support

    def label(self) -> str:
        return f"C{self.constraint_index + 1}:" + "".join(str(b) for b in self.assignment)


def parse_lbcs(text: str) -> LinearBinarySystem:
    constraints = []
    top = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        support = []
        rhs = None
        state = "var"  # what the grammar expects next
        pos = 0
        while pos < len(line):
            mt = _TOKEN.match(line, pos)
            if mt is None:  # only trailing whitespace left
                break
            col = mt.start() + len(mt.group(0)) - len(mt.group(0).lstrip()) + 1
            pos = mt.end()
            if mt.group("bad"):
                raise ParseError(f"unexpected character {mt.group('bad')!r}", lineno, col)
            if state == "var":
                if not mt.group("var"):
                    if mt.group("eq") and not support:
                        raise ParseError("empty support", lineno, col)
                    raise ParseError("expected a variable like x1", lineno, col)
                idx = int(mt.group("idx"))
                if idx < 1:
                    raise ParseError("variables are numbered from x1", lineno, col)
                if idx - 1 in support:
                    raise ParseError(f"repeated variable x{idx}", lineno, col)
                support.append(idx - 1)
                state = "op"
            elif state == "op":
                if mt.group("plus"):
                    state = "var"
                elif mt.group("eq"):
                    state = "rhs"
                else:
                    raise ParseError("expected '+' or '='", lineno, col)
            elif state == "rhs":
                if not mt.group("num"):
                    raise ParseError("expected right-hand side 0 or 1", lineno, col)
                if mt.group("num") not in ("0", "1"):
                    raise ParseError(f"right-hand side must be 0 or 1, got {mt.group('num')}", lineno, col)
                rhs = int(mt.group("num"))
                state = "end"
            else:
                raise ParseError("unexpected text after right-hand side", lineno, col)
        if state != "end":
            raise ParseError("incomplete constraint", lineno, len(line.rstrip()) + 1)
        constraints.append((tuple(support), rhs))
        top = max(top, max(support) + 1)
    return LinearBinarySystem(top, tuple(constraints))


def format_lbcs(system: LinearBinarySystem) -> str:
    lines = [" + ".join(f"x{i + 1}" for i in support) + f" = {rhs}" for support, rhs in system.constraints]
    return "\n".join(lines) + ("\n" if lines else "")


def homogenize(system: LinearBinarySystem) -> LinearBinarySystem:
    return LinearBinarySystem(system.variable_count, tuple((s, 0) for s, _ in system.constraints))


def solve_f2(system: LinearBinarySystem) -> tuple | None:
    """Gaussian elimination over GF(2) on bitmask rows; free variables are 0."""
    rows = []
    for support, rhs in system.constraints:
        mask = 0
        for i in support:
            mask |= 1 << i
        rows.append([mask, rhs])
    pivots = []
    r = 0
    for col in range(system.variable_count):
        bit = 1 << col
        p = next((i for i in range(r, len(rows)) if rows[i][0] & bit), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][0] & bit:
                rows[i][0] ^= rows[r][0]
                rows[i][1] ^= rows[r][1]
        pivots.append(col)
        r += 1
    if any(mask == 0 and rhs for mask, rhs in rows):
        return None
    x = [0] * system.variable_count
    for i, col in enumerate(pivots):
        x[col] = rows[i][1]
    return tuple(x)


def satisfies(system: LinearBinarySystem, x) -> bool:
    return all(sum(x[i] for i in s) % 2 == b for s, b in system.constraints)


def constraint_graph(system: LinearBinarySystem) -> tuple[DirectedGraph, list[ConstraintVertex]]:
    """Game graph: one vertex per satisfying assignment of each constraint,
    adjacent when the two partial assignments are inconsistent."""
    vertices = []
    for l, (support, rhs) in enumerate(system.constraints):
        if len(support) > MAX_SUPPORT:
            raise GraphError(f"constraint {l + 1} has {len(support)} variables (limit {MAX_SUPPORT})")
        block = [a for a in itertools.product((0, 1), repeat=len(support)) if sum(a) % 2 == rhs]
        if not block:
            warnings.warn(f"constraint {l + 1} has no satisfying assignment; its block is empty")
        vertices.extend(ConstraintVertex(l, a) for a in block)
    if not vertices:
        raise GraphError("constraint system yields no vertices")
    values = [dict(zip(system.constraints[v.constraint_index][0], v.assignment)) for v in vertices]
    edges = []
    for i, j in itertools.combinations(range(len(vertices)), 2):
        if vertices[i].constraint_index == vertices[j].constraint_index:
            clash = True  # distinct assignments to the same support
        else:
            vi, vj = values[i], values[j]
            clash = any(vj.get(x, b) != b for x, b in vi.items())
        if clash:
            edges.append((i, j))
    g = orient(edges, len(vertices), labels=[v.label() for v in vertices])
    return g, vertices


def mermin_peres() -> LinearBinarySystem:
    """Magic-square system: three row constraints, then three column
    constraints, the last with right-hand side 1."""
    rows = [(0, 1, 2), (3, 4, 5), (6, 7, 8)]
    cols = [(0, 3, 6), (1, 4, 7), (2, 5, 8)]
    return LinearBinarySystem(9, tuple((s, 0) for s in rows) + ((cols[0], 0), (cols[1], 0), (cols[2], 1)))
