"""Exact and closed-form counts of rainbow copies of a small pattern graph."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

from .errors import AnchorNotInGraph, CostGuardExceeded, NoEdges, PatternTooLarge
from .graph_core import EdgeColouredGraph

MAX_AUT_VERTICES = 10
COST_GUARD_F = 8
COST_GUARD_N = 500


@dataclass(frozen=True, eq=False)
class PatternGraph:
    """Pattern F on vertices ``range(f)`` with an optional partition into independent parts."""

    f: int
    edges: tuple
    parts: Optional[tuple] = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        canon = []
        seen = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v or not (0 <= u < self.f and 0 <= v < self.f):
                raise ValueError(f"bad pattern edge ({u}, {v})")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate pattern edge {key}")
            seen.add(key)
            canon.append(key)
        object.__setattr__(self, "edges", tuple(canon))
        if self.parts is not None:
            parts = tuple(tuple(sorted(int(x) for x in p)) for p in self.parts)
            flat = sorted(x for p in parts for x in p)
            if flat != list(range(self.f)):
                raise ValueError("parts must partition the pattern vertices")
            where = {x: i for i, p in enumerate(parts) for x in p}
            for u, v in canon:
                if where[u] == where[v]:
                    raise ValueError("pattern parts must be independent sets")
            object.__setattr__(self, "parts", parts)

    @property
    def h(self) -> int:
        return len(self.edges)

    @cached_property
    def nbrs(self) -> tuple:
        out = [set() for _ in range(self.f)]
        for u, v in self.edges:
            out[u].add(v)
            out[v].add(u)
        return tuple(frozenset(s) for s in out)

    @cached_property
    def degrees(self) -> tuple:
        return tuple(len(s) for s in self.nbrs)

    @cached_property
    def aut(self) -> int:
        return automorphisms(self)[0]

    @cached_property
    def aut_partite(self) -> Optional[int]:
        return automorphisms(self)[1]

    @cached_property
    def a_value(self) -> int:
        return a_value(self)

    def to_dict(self) -> dict:
        out = {"f": self.f, "edges": [list(e) for e in self.edges]}
        if self.name:
            out["name"] = self.name
        if self.parts is not None:
            out["parts"] = [list(p) for p in self.parts]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "PatternGraph":
        parts = data.get("parts")
        return cls(int(data["f"]), tuple(tuple(e) for e in data["edges"]),
                   tuple(tuple(p) for p in parts) if parts else None, data.get("name", ""))


def complete(f: int) -> PatternGraph:
    return PatternGraph(f, tuple(itertools.combinations(range(f), 2)), name=f"k{f}")


def cycle(s: int) -> PatternGraph:
    if s < 3:
        raise ValueError("cycles need at least 3 vertices")
    return PatternGraph(s, tuple((i, (i + 1) % s) for i in range(s)), name=f"c{s}")


def path(k: int) -> PatternGraph:
    """Path with ``k`` edges."""
    return PatternGraph(k + 1, tuple((i, i + 1) for i in range(k)), name=f"path{k}")


def star(k: int) -> PatternGraph:
    return PatternGraph(k + 1, tuple((0, i) for i in range(1, k + 1)), name=f"star{k}")


def matching(k: int) -> PatternGraph:
    return PatternGraph(2 * k, tuple((2 * i, 2 * i + 1) for i in range(k)), name=f"{k}k2")


PRESETS = {
    "k2": lambda: complete(2),
    "k3": lambda: complete(3),
    "c4": lambda: cycle(4),
    "c5": lambda: cycle(5),
    "path2": lambda: path(2),
    "2k2": lambda: matching(2),
}


def parse_pattern(spec: str) -> PatternGraph:
    """Preset name or inline edge list such as ``"0-1,1-2,2-0"``."""
    key = spec.strip().lower()
    if key in PRESETS:
        return PRESETS[key]()
    if key.startswith("c") and key[1:].isdigit():
        return cycle(int(key[1:]))
    if key.startswith("k") and key[1:].isdigit():
        return complete(int(key[1:]))
    edges = []
    for tok in key.replace(";", ",").split(","):
        tok = tok.strip()
        if not tok:
            continue
        a, sep, b = tok.partition("-")
        if not sep:
            raise ValueError(f"cannot parse pattern edge {tok!r}")
        edges.append((int(a), int(b)))
    if not edges:
        raise ValueError(f"unknown pattern {spec!r}")
    f = max(max(e) for e in edges) + 1
    return PatternGraph(f, tuple(edges), name=key)


# automorphisms

def _aut_search(F: PatternGraph, partite: bool, fixed: Optional[dict] = None, stop_at_one: bool = False) -> int:
    f = F.f
    nb, deg = F.nbrs, F.degrees
    part_of = None
    if partite:
        part_of = [0] * f
        for i, p in enumerate(F.parts):
            for x in p:
                part_of[x] = i
    image = [-1] * f
    taken = [False] * f
    part_map: dict = {}
    part_used: dict = {}
    fixed = fixed or {}
    count = 0

    def rec(x):
        nonlocal count
        if x == f:
            count += 1
            return stop_at_one
        cands = [fixed[x]] if x in fixed else range(f)
        for y in cands:
            if taken[y] or deg[y] != deg[x]:
                continue
            ok = True
            for z in range(x):
                if (z in nb[x]) != (image[z] in nb[y]):
                    ok = False
                    break
            if not ok:
                continue
            added = False
            if partite:
                px, py = part_of[x], part_of[y]
                if px in part_map:
                    if part_map[px] != py:
                        continue
                else:
                    if py in part_used:
                        continue
                    part_map[px] = py
                    part_used[py] = px
                    added = True
            image[x] = y
            taken[y] = True
            done = rec(x + 1)
            taken[y] = False
            image[x] = -1
            if added:
                del part_map[part_of[x]]
                del part_used[part_of[y]]
            if done:
                return True
        return False

    rec(0)
    return count


def automorphisms(F: PatternGraph) -> tuple:
    """``(|Aut(F)|, |Aut_X(F)|)``; the second entry is None without parts."""
    if F.f > MAX_AUT_VERTICES:
        raise PatternTooLarge(f"automorphism enumeration limited to f <= {MAX_AUT_VERTICES}")
    plain = _aut_search(F, partite=False)
    part = _aut_search(F, partite=True) if F.parts is not None else None
    return plain, part


def _vertex_orbits(F: PatternGraph, partite: bool) -> list:
    orbits, seen = [], set()
    for x in range(F.f):
        if x in seen:
            continue
        orb = [y for y in range(F.f) if y == x or _aut_search(F, partite, {x: y}, stop_at_one=True)]
        seen.update(orb)
        orbits.append(orb)
    return orbits


def _oriented_edge_orbits(F: PatternGraph, partite: bool) -> list:
    arcs = [(u, v) for u, v in F.edges] + [(v, u) for u, v in F.edges]
    orbits, seen = [], set()
    for a, b in arcs:
        if (a, b) in seen:
            continue
        orb = [(c, d) for c, d in arcs
               if (c, d) == (a, b) or _aut_search(F, partite, {a: c, b: d}, stop_at_one=True)]
        seen.update(orb)
        orbits.append(orb)
    return orbits


def a_value(F: PatternGraph) -> int:
    """max of Delta(F), max_{uv} d(u)+d(v)-2 and max over 2-paths uvw of d(u)+d(v)+d(w)-4."""
    if F.h == 0:
        raise NoEdges("a(F) needs at least one edge")
    deg = F.degrees
    a1 = max(deg)
    a2 = max(deg[u] + deg[v] - 2 for u, v in F.edges)
    a3 = 0
    for v in range(F.f):
        for u, w in itertools.combinations(sorted(F.nbrs[v]), 2):
            a3 = max(a3, deg[u] + deg[v] + deg[w] - 4)
    return max(a1, a2, a3)


# enumeration

def _ordering(F: PatternGraph, first: Sequence[int]) -> list:
    order = list(first)
    placed = set(order)
    while len(order) < F.f:
        best, key = None, None
        for x in range(F.f):
            if x in placed:
                continue
            k = (len(F.nbrs[x] & placed), F.degrees[x], -x)
            if key is None or k > key:
                best, key = x, k
        order.append(best)
        placed.add(best)
    return order


class _Embedder:
    """Backtracking enumerator of embeddings with incremental colour tracking."""

    def __init__(self, G: EdgeColouredGraph, F: PatternGraph, fixed: dict, allowed: Optional[dict] = None,
                 rainbow_only: bool = True, collect: bool = False):
        self.G = G
        self.adj = G.adjacency
        self.nbrsets = G.neighbour_sets
        self.order = _ordering(F, list(fixed))
        pos = {x: i for i, x in enumerate(self.order)}
        self.back = [[pos[y] for y in F.nbrs[x] if pos[y] < i] for i, x in enumerate(self.order)]
        self.fixed = [fixed.get(x) for x in self.order]
        self.allowed = [allowed.get(x) if allowed else None for x in self.order]
        self.rainbow_only = rainbow_only
        self.collect = collect
        self.found: list = []
        self.total = 0
        self.rainbow = 0
        self.k = F.f
        self.img = [0] * F.f

    def run(self):
        self._rec(0, 0, True)
        return self

    def _cands(self, i):
        back = self.back[i]
        img = self.img
        if self.fixed[i] is not None:
            c = self.fixed[i]
            for j in back:
                if c not in self.nbrsets[img[j]]:
                    return ()
            return (c,)
        if back:
            sets = sorted((self.nbrsets[img[j]] for j in back), key=len)
            cand = set(sets[0])
            for s in sets[1:]:
                cand &= s
        else:
            cand = set(range(self.G.n))
        if self.allowed[i] is not None:
            cand &= self.allowed[i]
        for j in range(i):
            cand.discard(img[j])
        return sorted(cand)

    def _rec(self, i, mask, rb):
        img, back, adj = self.img, self.back[i], self.adj
        last = i == self.k - 1
        for w in self._cands(i):
            m2, rb2 = mask, rb
            aw = adj[w]
            for j in back:
                c = aw[img[j]]
                bit = 1 << c
                if m2 & bit:
                    rb2 = False
                    if self.rainbow_only:
                        break
                m2 |= bit
            if self.rainbow_only and not rb2:
                continue
            img[i] = w
            if last:
                self.total += 1
                if rb2:
                    self.rainbow += 1
                    if self.collect:
                        self.found.append(tuple(img))
            else:
                self._rec(i + 1, m2, rb2)

    def embedding(self, found_row) -> dict:
        return {x: found_row[i] for i, x in enumerate(self.order)}


@dataclass(frozen=True)
class CopyCounts:
    total: int
    rainbow: int

    @property
    def nonrainbow(self) -> int:
        return self.total - self.rainbow


def _partite_maps(F: PatternGraph, parts_G: Sequence[Sequence[int]]):
    if F.parts is None:
        raise ValueError("partite counting needs a pattern with parts")
    sets = [frozenset(int(v) for v in p) for p in parts_G]
    seen = set()
    for s in sets:
        if seen & s:
            raise ValueError("graph parts must be disjoint")
        seen |= s
    for pi in itertools.permutations(range(len(sets)), len(F.parts)):
        allowed = {}
        for i, xs in enumerate(F.parts):
            for x in xs:
                allowed[x] = sets[pi[i]]
        yield allowed


def _count(G, F, anchor, partite, rainbow_only) -> CopyCounts:
    if anchor is None and F.f > COST_GUARD_F and G.n > COST_GUARD_N:
        raise CostGuardExceeded(f"unanchored count with f={F.f} on n={G.n} exceeds the cost guard")
    use_partite = partite is not None
    if use_partite:
        allowed_list = list(_partite_maps(F, partite))
        denom = _aut_search(F, partite=True)
    else:
        allowed_list = [None]
        denom = F.aut
    jobs = []  # (fixed dict, multiplicity)
    if anchor is None:
        jobs.append(({}, 1))
    elif isinstance(anchor, (int,)) or (hasattr(anchor, "__index__") and not isinstance(anchor, tuple)):
        u = int(anchor)
        if not 0 <= u < G.n:
            raise AnchorNotInGraph(f"vertex {u} not in graph")
        if G.degrees[u] == 0 and F.h > 0:
            return CopyCounts(0, 0)
        for orb in _vertex_orbits(F, use_partite):
            jobs.append(({orb[0]: u}, len(orb)))
    else:
        u, v = (int(x) for x in anchor)
        if not (0 <= u < G.n and 0 <= v < G.n) or u == v or not G.has_edge(u, v):
            raise AnchorNotInGraph(f"edge ({u}, {v}) not in graph")
        if F.h == 0:
            return CopyCounts(0, 0)
        for orb in _oriented_edge_orbits(F, use_partite):
            a, b = orb[0]
            jobs.append(({a: u, b: v}, len(orb)))
    total = rainbow = 0
    for allowed in allowed_list:
        for fixed, mult in jobs:
            e = _Embedder(G, F, fixed, allowed, rainbow_only=rainbow_only).run()
            total += mult * e.total
            rainbow += mult * e.rainbow
    assert total % denom == 0 and rainbow % denom == 0
    return CopyCounts(total // denom, rainbow // denom)


def count_copies(G: EdgeColouredGraph, F: PatternGraph, anchor=None, partite=None) -> CopyCounts:
    """Total and rainbow copy counts in one enumeration.

    ``anchor`` is None, a vertex, or an edge ``(u, v)``; an edge anchor counts
    copies that use the edge itself. ``partite`` is a sequence of disjoint vertex
    sets of G, used together with ``F.parts``.
    """
    return _count(G, F, anchor, partite, rainbow_only=False)


def count_rainbow(G: EdgeColouredGraph, F: PatternGraph, anchor=None, partite=None) -> int:
    return _count(G, F, anchor, partite, rainbow_only=True).rainbow


def count_nonrainbow(G: EdgeColouredGraph, F: PatternGraph, anchor=None, partite=None) -> int:
    return count_copies(G, F, anchor, partite).nonrainbow


def rainbow_embeddings(G: EdgeColouredGraph, F: PatternGraph, fixed: Optional[dict] = None,
                       allowed: Optional[dict] = None) -> list:
    """All rainbow embeddings as tuples ``t`` with ``t[x]`` the image of pattern vertex ``x``."""
    e = _Embedder(G, F, fixed or {}, allowed, rainbow_only=True, collect=True).run()
    inv = [e.order.index(x) for x in range(F.f)]
    return [tuple(row[inv[x]] for x in range(F.f)) for row in e.found]


def estimate_rainbow(n: int, d: float, F: PatternGraph, anchor: str = "vertex", partite: Optional[int] = None) -> float:
    """Closed-form rainbow count predictions for quasirandom hosts.

    ``anchor`` is ``"none"``, ``"vertex"`` or ``"edge"``. With ``partite=r`` the
    pattern must carry ``r`` parts of common size f and the host has r parts of
    size n.
    """
    if not 0 < d <= 1:
        raise ValueError("need 0 < d <= 1")
    h = F.h
    if partite is None:
        f, aut = F.f, F.aut
        if anchor == "none":
            return d ** h * n ** f / aut
        if anchor == "vertex":
            return f * d ** h * n ** (f - 1) / aut
        if anchor == "edge":
            return 2 * h * d ** (h - 1) * n ** (f - 2) / aut
        raise ValueError(f"unknown anchor {anchor!r}")
    r = int(partite)
    if F.parts is None or len(F.parts) != r or len({len(p) for p in F.parts}) != 1:
        raise ValueError("partite estimate needs r parts of equal size")
    f = len(F.parts[0])
    aut = F.aut_partite
    if anchor == "none":
        return math.factorial(r) * d ** h * n ** (f * r) / aut
    if anchor == "vertex":
        return math.factorial(r) * f * d ** h * n ** (f * r - 1) / aut
    if anchor == "edge":
        return math.factorial(r) * h * d ** (h - 1) * n ** (f * r - 2) / (math.comb(r, 2) * aut)
    raise ValueError(f"unknown anchor {anchor!r}")
