"""Per-layer state, the randomized copy finder, and the fill/swap routines that grow
layers after the hypergraph matching."""
from __future__ import annotations

import random
from typing import Optional

from ..graph_core import EdgeColouredGraph
from ..pattern_count import PatternGraph, _ordering


class EdgePool:
    """Edges not yet used by any layer: ``adj[u][v] = colour``."""

    def __init__(self, G: EdgeColouredGraph):
        self.adj = [dict(row) for row in G.adjacency]
        self.by_colour: dict = {}
        for (u, v), c in zip(G.edges.tolist(), G.colours.tolist()):
            self.by_colour.setdefault(c, set()).add((u, v))

    def take(self, u: int, v: int) -> int:
        c = self.adj[u].pop(v)
        del self.adj[v][u]
        self.by_colour[c].discard((min(u, v), max(u, v)))
        return c

    def give(self, u: int, v: int, c: int):
        self.adj[u][v] = c
        self.adj[v][u] = c
        self.by_colour.setdefault(c, set()).add((min(u, v), max(u, v)))

    def has(self, u: int, v: int) -> bool:
        return v in self.adj[u]


class Layer:
    """A growing rainbow, vertex-disjoint collection of copies (or edges)."""

    __slots__ = ("index", "free", "colours", "copies")

    def __init__(self, index: int, vertices):
        self.index = index
        self.free = set(vertices)
        self.colours = set()
        self.copies: list = []  # (vertex tuple, [(u, v, c), ...])

    def add(self, verts, edges):
        self.free.difference_update(verts)
        self.colours.update(c for _, _, c in edges)
        self.copies.append((tuple(verts), list(edges)))

    @property
    def covered(self) -> int:
        return sum(len(v) for v, _ in self.copies)

    @property
    def num_edges(self) -> int:
        return sum(len(e) for _, e in self.copies)


class CopyFinder:
    """Randomized depth-first search for one rainbow copy of F on free vertices,
    free edges and colours new to the layer."""

    def __init__(self, F: PatternGraph, width: int = 4):
        self.F = F
        self.order = _ordering(F, [0])
        pos = {x: i for i, x in enumerate(self.order)}
        self.back = [sorted(pos[y] for y in F.nbrs[x] if pos[y] < i) for i, x in enumerate(self.order)]
        self.width = width

    def find(self, pool: EdgePool, layer: Layer, rnd: random.Random, budget: int) -> Optional[tuple]:
        f = self.F.f
        img = [-1] * f
        used = set()
        cols: list = []
        R = layer.free
        if len(R) < f:
            return None
        Rlist = sorted(R)
        adj = pool.adj
        lc = layer.colours
        nodes = [0]

        def cands(i):
            back = self.back[i]
            if not back:
                k = min(len(Rlist), 4 * self.width)
                return [w for w in rnd.sample(Rlist, k) if w not in used]
            p = img[back[0]]
            others = [img[j] for j in back[1:]]
            out = []
            ap = adj[p]
            if len(R) < len(ap):
                pairs = [(w, ap[w]) for w in R if w in ap]
            else:
                pairs = [(w, c) for w, c in ap.items() if w in R]
            for w, c in pairs:
                if w in used or c in lc or c in cols:
                    continue
                ok = True
                new = [c]
                for o in others:
                    c2 = adj[w].get(o)
                    if c2 is None or c2 in lc or c2 in cols or c2 in new:
                        ok = False
                        break
                    new.append(c2)
                if ok:
                    out.append(w)
            if i == f - 1 or len(out) <= self.width:
                rnd.shuffle(out)
                return out
            return rnd.sample(out, self.width)

        def rec(i):
            nodes[0] += 1
            if nodes[0] > budget:
                return False
            for w in cands(i):
                back = self.back[i]
                added = [adj[w][img[j]] for j in back]
                img[i] = w
                used.add(w)
                cols.extend(added)
                if i == f - 1 or rec(i + 1):
                    return True
                del cols[len(cols) - len(added):]
                used.discard(w)
                img[i] = -1
                if nodes[0] > budget:
                    return False
            return False

        if not rec(0):
            return None
        verts = [0] * f
        for i, x in enumerate(self.order):
            verts[x] = img[i]
        edges = []
        for a, b in self.F.edges:
            u, v = verts[a], verts[b]
            edges.append((min(u, v), max(u, v), adj[u][v]))
        return tuple(verts), edges


def commit(pool: EdgePool, layer: Layer, verts, edges):
    for u, v, _ in edges:
        pool.take(u, v)
    layer.add(verts, edges)


def fill_layer(finder: CopyFinder, pool: EdgePool, layer: Layer, rnd: random.Random, budget: int, tries: int,
               cap: Optional[int] = None) -> int:
    """Add copies until ``tries`` consecutive searches fail or ``cap`` copies are held."""
    added = 0
    fails = 0
    while fails < tries and (cap is None or len(layer.copies) < cap):
        got = finder.find(pool, layer, rnd, budget)
        if got is None:
            fails += 1
            continue
        fails = 0
        commit(pool, layer, *got)
        added += 1
    return added


# edge-level growth for matching kinds

def greedy_edges(pool: EdgePool, layer: Layer, rnd: random.Random) -> int:
    """Add free edges between free vertices with colours new to the layer."""
    added = 0
    order = sorted(layer.free)
    rnd.shuffle(order)
    for u in order:
        if u not in layer.free:
            continue
        opts = [(w, c) for w, c in pool.adj[u].items() if w in layer.free and c not in layer.colours]
        if opts:
            w, c = opts[rnd.randrange(len(opts))]
            a, b = min(u, w), max(u, w)
            commit(pool, layer, (a, b), [(a, b, c)])
            added += 1
    return added


def swap_edges(pool: EdgePool, layer: Layer, rnd: random.Random, general_limit: int = 0) -> int:
    """One pass of remove-one-add-two moves.

    A matched edge ab is replaced by two disjoint free edges on the freed vertex
    set; one of them must touch a or b. With ``general_limit`` > 0 and at most that
    many free vertices, the second edge may be any edge among free vertices.
    """
    gained = 0
    idx = list(range(len(layer.copies)))
    rnd.shuffle(idx)
    removed = set()
    for k in idx:
        verts, edges = layer.copies[k]
        if k in removed or len(edges) != 1:
            continue
        a, b, c = edges[0]
        R = layer.free
        freec = lambda x: x == c or x not in layer.colours  # noqa: E731
        opts_a = [(x, cx) for x, cx in pool.adj[a].items() if x in R and freec(cx)]
        opts_b = [(y, cy) for y, cy in pool.adj[b].items() if y in R and freec(cy)]
        found = None
        for x, cx in opts_a:
            for y, cy in opts_b:
                if x != y and cx != cy:
                    found = ((a, x, cx), (b, y, cy))
                    break
            if found:
                break
        if found is None:
            general = general_limit and len(R) <= general_limit
            firsts = [(a, b, x, cx) for x, cx in opts_a] + [(b, a, y, cy) for y, cy in opts_b]
            for z, other, x, cx in firsts:
                if general:
                    rest = (R - {x}) | {other}
                    seconds = ((u, w, cw) for u in rest for w, cw in pool.adj[u].items()
                               if u < w and w in rest and freec(cw))
                else:
                    seconds = ((u, w, c) for u, w in pool.by_colour.get(c, ())
                               if (u in R or u == other) and (w in R or w == other))
                for u, w, cw in seconds:
                    if cw != cx and x not in (u, w) and z not in (u, w):
                        found = ((z, x, cx), (u, w, cw))
                        break
                if found:
                    break
        if found is None:
            continue
        # apply: drop ab, add the two edges
        pool.give(a, b, c)
        layer.colours.discard(c)
        layer.free.update((a, b))
        removed.add(k)
        for u, w, cw in found:
            s, t = min(u, w), max(u, w)
            pool.take(s, t)
            layer.free.difference_update((s, t))
            layer.colours.add(cw)
            layer.copies.append(((s, t), [(s, t, cw)]))
        gained += 1
    if removed:
        layer.copies = [cp for k, cp in enumerate(layer.copies) if k not in removed]
    return gained
