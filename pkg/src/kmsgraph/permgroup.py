"""Permutations as image tuples, and group order via Schreier-Sims.

A permutation ``p`` sends point ``i`` to ``p[i]``. Composition follows
function notation: ``compose(p, q)[i] == p[q[i]]``.
"""

from __future__ import annotations

Permutation = tuple  # tuple[int, ...]


def check_perm(p) -> None:
    if sorted(p) != list(range(len(p))):
        raise ValueError(f"not a permutation: {p!r}")


def identity(n: int) -> Permutation:
    return tuple(range(n))


def compose(p, q) -> Permutation:
    return tuple(p[i] for i in q)


def inverse(p) -> Permutation:
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


def is_identity(p) -> bool:
    return all(i == x for i, x in enumerate(p))


def orbits(gens, n: int) -> list[list[int]]:
    """Orbit partition of {0..n-1}; each orbit sorted, orbits sorted by minimum."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for i, j in enumerate(g):
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def orbit_of(point: int, gens) -> set[int]:
    seen = {point}
    stack = [point]
    while stack:
        x = stack.pop()
        for g in gens:
            y = g[x]
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


class StabilizerChain:
    """Deterministic Schreier-Sims.

    Strong generators live in one list; level ``i`` uses those fixing the
    first ``i`` base points. New base points are the smallest point moved by
    the sifted residue that forced them.
    """

    def __init__(self, gens, n: int):
        self.n = n
        self.strong: list = []
        self.base: list[int] = []
        for g in gens:
            g = tuple(g)
            check_perm(g)
            if len(g) != n:
                raise ValueError("generator has the wrong degree")
            if not is_identity(g):
                self._add_strong(g)
        self._cache: dict = {}
        i = len(self.base) - 1
        while i >= 0:
            j = self._first_failure(i)
            if j is None:
                i -= 1
            else:
                i = j

    def _add_strong(self, g) -> None:
        self.strong.append(g)
        if all(g[b] == b for b in self.base):
            self.base.append(next(k for k, x in enumerate(g) if k != x))

    def level_gens(self, i: int) -> list:
        prefix = self.base[:i]
        return [s for s in self.strong if all(s[b] == b for b in prefix)]

    def transversal(self, i: int) -> dict:
        t = self._cache.get(i)
        if t is None:
            gens = self.level_gens(i)
            t = {self.base[i]: identity(self.n)}
            queue = [self.base[i]]
            while queue:
                p = queue.pop()
                for s in gens:
                    q = s[p]
                    if q not in t:
                        t[q] = compose(s, t[p])
                        queue.append(q)
            self._cache[i] = t
        return t

    def _first_failure(self, i: int):
        """Test Schreier generators at level i; on the first one that does
        not sift, record its residue and return the level where it stopped."""
        t = self.transversal(i)
        gens = self.level_gens(i)
        for p, u in t.items():
            for s in gens:
                h = compose(inverse(t[s[p]]), compose(s, u))
                if is_identity(h):
                    continue
                r, j = self.sift(h, i + 1)
                if not is_identity(r):
                    self._add_strong(r)
                    self._cache.clear()
                    return j
        return None

    def order(self) -> int:
        out = 1
        for i in range(len(self.base)):
            out *= len(self.transversal(i))
        return out

    def sift(self, g, start: int = 0):
        for k in range(start, len(self.base)):
            t = self.transversal(k)
            u = t.get(g[self.base[k]])
            if u is None:
                return g, k
            g = compose(inverse(u), g)
        return g, len(self.base)

    def contains(self, g) -> bool:
        h, _ = self.sift(tuple(g))
        return is_identity(h)


def group_order(gens, n: int) -> int:
    return StabilizerChain(gens, n).order()
