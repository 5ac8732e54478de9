"""Automorphism groups, pointwise stabilizers and orbit partitions.

Search is backtracking over partial bijections.  Candidates are pruned by a
colour refinement (degree vectors per relation and argument position, then
iterated neighbourhood signatures) with the fixed set individualized, and
each assignment is checked against every relation tuple whose entries are
all assigned, in both directions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

from .structure import Structure

MAX_GROUP_SIZE = 24     # full group enumeration
MAX_ORBIT_SIZE = 64     # orbit computation (no group materialization)

Permutation = tuple


class SizeCapError(ValueError):
    pass


@dataclass(frozen=True)
class OrbitPartition:
    base_set: frozenset
    blocks: tuple[frozenset, ...]

    def block_of(self, e: int) -> frozenset:
        for b in self.blocks:
            if e in b:
                return b
        raise KeyError(e)

    def sizes(self) -> list[int]:
        return [len(b) for b in self.blocks]


class UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x, y):
        x, y = self.find(x), self.find(y)
        if x != y:
            if y < x:
                x, y = y, x
            self.parent[y] = x


class _Search:
    def __init__(self, s: Structure):
        self.s = s
        self.n = s.size
        self.rels = {r: s.relations.get(r, frozenset()) for r, _ in s.signature.relations}
        self.incident = [[] for _ in range(self.n)]
        for r, ts in self.rels.items():
            for t in ts:
                for e in set(t):
                    self.incident[e].append((r, t))
        base = []
        for e in range(self.n):
            sig = []
            for r, k in s.signature.relations:
                pos = [0] * k
                loops = 0
                for rr, t in self.incident[e]:
                    if rr != r:
                        continue
                    for i, x in enumerate(t):
                        if x == e:
                            pos[i] += 1
                    if len(set(t)) < len(t):
                        loops += 1
                sig.append((tuple(pos), loops))
            base.append(tuple(sig))
        self.base = base
        self.constants = frozenset(s.constants.values())
        # assignment order: breadth-first over the incidence graph
        self.neigh = [sorted({x for _, t in self.incident[e] for x in t} - {e})
                      for e in range(self.n)]

    def refine(self, colorings: list[list]) -> list[list[int]]:
        """Refine several initial colourings in lockstep with a shared
        palette, so that colours are comparable across them."""
        palette = {}
        cur = []
        for col in colorings:
            cur.append([palette.setdefault(c, len(palette)) for c in col])
        while True:
            palette = {}
            nxt = []
            for col in cur:
                new = []
                for e in range(self.n):
                    sig = (col[e], tuple(sorted(
                        (r, tuple(i for i, x in enumerate(t) if x == e), tuple(col[x] for x in t))
                        for r, t in self.incident[e])))
                    new.append(palette.setdefault(sig, len(palette)))
                nxt.append(new)
            if all(len(set(a)) == len(set(b)) for a, b in zip(cur, nxt)):
                return nxt
            cur = nxt

    def initial(self, fixed: dict[int, object]) -> list:
        return [(self.base[e], fixed.get(e)) for e in range(self.n)]

    def order(self, dom_col: list[int], first: Iterable[int]) -> list[int]:
        sizes = {}
        for c in dom_col:
            sizes[c] = sizes.get(c, 0) + 1
        seen, out = set(), []
        pending = list(first)
        rest = sorted(range(self.n), key=lambda e: (sizes[dom_col[e]], e))
        while len(out) < self.n:
            if not pending:
                pending = [next(e for e in rest if e not in seen)]
            queue = pending
            pending = []
            while queue:
                e = queue.pop(0)
                if e in seen:
                    continue
                seen.add(e)
                out.append(e)
                queue += sorted((x for x in self.neigh[e] if x not in seen),
                                key=lambda x: (sizes[dom_col[x]], x))
        return out

    def consistent(self, v, w, fwd, bwd) -> bool:
        for r, t in self.incident[v]:
            if all(x in fwd for x in t):
                if tuple(fwd[x] for x in t) not in self.rels[r]:
                    return False
        for r, t in self.incident[w]:
            if all(x in bwd for x in t):
                if tuple(bwd[x] for x in t) not in self.rels[r]:
                    return False
        return True

    def search(self, dom_col, cod_col, pre: dict[int, int]) -> Iterator[Permutation]:
        """Yield every automorphism extending ``pre`` that maps each element
        to one of the same refined colour."""
        if sorted(dom_col) != sorted(cod_col):
            return
        fwd, bwd = {}, {}
        for v, w in pre.items():
            if w in bwd or dom_col[v] != cod_col[w]:
                return
            fwd[v], bwd[w] = w, v
            if not self.consistent(v, w, fwd, bwd):
                return
        order = [e for e in self.order(dom_col, pre) if e not in pre]
        by_color = {}
        for w in range(self.n):
            by_color.setdefault(cod_col[w], []).append(w)

        def extend(i):
            if i == len(order):
                yield tuple(fwd[e] for e in range(self.n))
                return
            v = order[i]
            for w in by_color[dom_col[v]]:
                if w in bwd:
                    continue
                fwd[v], bwd[w] = w, v
                if self.consistent(v, w, fwd, bwd):
                    yield from extend(i + 1)
                del fwd[v], bwd[w]

        yield from extend(0)


@lru_cache(maxsize=256)
def _searcher(s: Structure) -> _Search:
    return _Search(s)


def _check_cap(s, cap, what):
    if s.size > cap:
        raise SizeCapError(f"structure size {s.size} exceeds the {what} cap of {cap}")


def _fixed_set(s: Structure, a: Iterable[int]) -> frozenset:
    a = frozenset(a)
    bad = [e for e in a if not 0 <= e < s.size]
    if bad:
        raise ValueError(f"elements {sorted(bad)} are outside the universe of size {s.size}")
    return a | frozenset(s.constants.values())


def stabilizer_group(s: Structure, a: Iterable[int] = (), cap: int = MAX_GROUP_SIZE) -> list[Permutation]:
    """All automorphisms of ``s`` fixing every element of ``a`` and every
    constant, in lexicographic order (identity first)."""
    _check_cap(s, cap, "group enumeration")
    fixed = _fixed_set(s, a)
    srch = _searcher(s)
    (col,) = srch.refine([srch.initial({e: ("fixed", e) for e in fixed})])
    return sorted(srch.search(col, col, {e: e for e in fixed}))


def find_automorphism(s: Structure, a: Iterable[int], src: int, dst: int) -> Permutation | None:
    """Some automorphism fixing ``a`` pointwise with ``src -> dst``, or None."""
    fixed = _fixed_set(s, a)
    if (src in fixed or dst in fixed) and src != dst:
        return None
    srch = _searcher(s)
    init = {e: ("fixed", e) for e in fixed}
    dom, cod = srch.refine([srch.initial({**init, src: "mark"}),
                            srch.initial({**init, dst: "mark"})])
    pre = {e: e for e in fixed}
    pre[src] = dst
    return next(srch.search(dom, cod, pre), None)


@lru_cache(maxsize=1 << 16)
def _orbits(s: Structure, a: frozenset) -> OrbitPartition:
    fixed = _fixed_set(s, a)
    srch = _searcher(s)
    (col,) = srch.refine([srch.initial({e: ("fixed", e) for e in fixed})])
    uf = UnionFind(s.size)
    for x in range(s.size):
        if x in fixed:
            continue
        for y in range(x + 1, s.size):
            if col[x] != col[y] or uf.find(x) == uf.find(y):
                continue
            perm = find_automorphism(s, a, x, y)
            if perm is not None:
                for i, j in enumerate(perm):
                    uf.union(i, j)
    blocks = {}
    for e in range(s.size):
        blocks.setdefault(uf.find(e), set()).add(e)
    ordered = sorted((frozenset(b) for b in blocks.values()), key=min)
    return OrbitPartition(frozenset(a), tuple(ordered))


def orbits(s: Structure, a: Iterable[int] = (), cap: int = MAX_ORBIT_SIZE) -> OrbitPartition:
    """Partition of the universe into orbits of the pointwise stabilizer of ``a``.

    Blocks are ordered by least element.  Orbits are assembled with a
    union-find over automorphisms found one at a time, so the group itself is
    never materialized.
    """
    _check_cap(s, cap, "orbit computation")
    return _orbits(s, frozenset(a))


def orbit_of(s: Structure, a: Iterable[int], e: int) -> frozenset:
    return orbits(s, a).block_of(e)


def is_rigid(s: Structure) -> bool:
    """True iff the identity is the only automorphism."""
    return all(len(b) == 1 for b in orbits(s, ()).blocks)


def compose(p: Permutation, q: Permutation) -> Permutation:
    """``p`` after ``q``."""
    return tuple(p[q[i]] for i in range(len(q)))


def inverse(p: Permutation) -> Permutation:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)
