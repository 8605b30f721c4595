"""Rainbow linking of path fragments through two reserve vertex sets."""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from ..errors import LinkingFailed
from ..graph_core import EdgeColouredGraph
from ..rng import child_seed, stream


@dataclass
class Linkage:
    """``links[j] = (x, a, b, y)`` joins the end x of fragment j to the start y of
    fragment j+1 (cyclically) via a in V1 and b in V2."""

    links: list
    colours: list
    attempts: int

    def edges(self) -> list:
        out = []
        for x, a, b, y in self.links:
            out += [(x, a), (a, b), (b, y)]
        return out


def link_fragments(fragments: Sequence[Sequence[int]], linker: EdgeColouredGraph, V1: Iterable[int],
                   V2: Iterable[int], forbidden_colours: Iterable[int] = (), used_colours: Iterable[int] = (),
                   seed: int = 0, restarts: int = 20, blocked_edges: Optional[set] = None) -> Linkage:
    """Vertex-disjoint rainbow paths x-a-b-y closing the fragments into one cycle.

    Randomized greedy: the link with the fewest candidate middle vertices is served
    first with a uniformly chosen valid (a, b); a dead end restarts from scratch.
    ``blocked_edges`` holds (min, max) pairs reserved by earlier calls.
    """
    k = len(fragments)
    if k == 0:
        return Linkage([], [], 0)
    ends = [(int(fragments[j][-1]), int(fragments[(j + 1) % k][0])) for j in range(k)]
    V1, V2 = sorted(set(int(v) for v in V1)), sorted(set(int(v) for v in V2))
    adj = linker.adjacency
    forb = set(int(c) for c in forbidden_colours)
    base_used = set(int(c) for c in used_colours)
    blocked = blocked_edges if blocked_edges is not None else set()
    rnd = random.Random(child_seed(stream(seed, "rainbow_decomp.linker")))
    fails = Counter()

    def ok_edge(u, v, cols):
        c = adj[u].get(v)
        if c is None or c in forb or c in cols or (min(u, v), max(u, v)) in blocked:
            return None
        return c

    for attempt in range(1, max(1, restarts) + 1):
        availA, availB = set(V1), set(V2)
        cols = set(base_used)
        pending = list(range(k))
        chosen: dict = {}
        dead = None
        while pending:
            best = None
            for j in pending:
                x, y = ends[j]
                A = [a for a in adj[x] if a in availA and ok_edge(x, a, cols) is not None]
                B = [b for b in adj[y] if b in availB and ok_edge(y, b, cols) is not None]
                key = len(A) * len(B)
                if best is None or key < best[0]:
                    best = (key, j, A, B)
            _, j, A, B = best
            x, y = ends[j]
            valid = []
            for a in A:
                c1 = adj[x][a]
                for b in B:
                    c2 = adj[y][b]
                    if c2 == c1:
                        continue
                    c3 = ok_edge(a, b, cols)
                    if c3 is None or c3 in (c1, c2):
                        continue
                    valid.append((a, b, c1, c3, c2))
            if not valid:
                dead = j
                break
            a, b, c1, c3, c2 = valid[rnd.randrange(len(valid))]
            chosen[j] = ((x, a, b, y), [c1, c3, c2])
            availA.discard(a)
            availB.discard(b)
            cols.update((c1, c2, c3))
            pending.remove(j)
        if dead is None:
            links = [chosen[j][0] for j in range(k)]
            colours = [c for j in range(k) for c in chosen[j][1]]
            return Linkage(links, colours, attempt)
        fails[dead] += 1
    worst = min(fails, key=lambda j: (-fails[j], j))
    raise LinkingFailed(f"no rainbow linkage after {restarts} restarts; link {worst} failed most often",
                        failed_link=worst)
