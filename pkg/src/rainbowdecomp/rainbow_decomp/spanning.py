"""Experimental spanning completion.

Only the block bookkeeping and a best-effort insertion heuristic are provided;
nothing here guarantees spanning output.
"""
from __future__ import annotations

import math
import random

from ..graph_core import EdgeColouredGraph
from ..rng import child_seed, stream


def block_size(f: int, b_prime: int) -> int:
    return f * (f - 1) * b_prime + f


def block_partition(n: int, f: int, seed: int = 0) -> list:
    """Random split of range(n) into blocks of size f(f-1)b'+f with b' about log n / f^2;
    the remainder forms a final short block."""
    b_prime = max(1, int(round(math.log(max(n, 2)) / (f * f))))
    b = block_size(f, b_prime)
    perm = stream(seed, "rainbow_decomp.blocks").permutation(n)
    return [perm[i:i + b] for i in range(0, n, b)]


def extend_cycles(G: EdgeColouredGraph, factors: list, seed: int = 0) -> dict:
    """Insert uncovered vertices into emitted cycles in place.

    A cycle edge uw is replaced by uz, zw when both are unused anywhere and their
    colours are new to the cycle (the colour of uw is released).
    """
    rnd = random.Random(child_seed(stream(seed, "rainbow_decomp.spanning")))
    used = {e for f in factors for e in f.edges}
    adj = G.adjacency
    inserted = []
    for f in factors:
        seq = list(f.copies[0])
        on = set(seq)
        cols = set(f.colours)
        outside = [z for z in range(G.n) if z not in on]
        rnd.shuffle(outside)
        added = 0
        for z in outside:
            for k in range(len(seq)):
                u, w = seq[k], seq[(k + 1) % len(seq)]
                cu, cw = adj[z].get(u), adj[z].get(w)
                if cu is None or cw is None or cu == cw:
                    continue
                old = adj[u][w]
                free_cols = cols - {old}
                if cu in free_cols or cw in free_cols:
                    continue
                if (min(u, z), max(u, z)) in used or (min(w, z), max(w, z)) in used:
                    continue
                seq.insert(k + 1, z)
                cols = free_cols | {cu, cw}
                used.discard((min(u, w), max(u, w)))
                used.update({(min(u, z), max(u, z)), (min(w, z), max(w, z))})
                added += 1
                break
        if added:
            edges = [(min(a, b), max(a, b)) for a, b in zip(seq, seq[1:] + seq[:1])]
            f.edges = edges
            f.colours = [adj[a][b] for a, b in edges]
            f.copies = [tuple(seq)]
        inserted.append(added)
    return {"inserted": inserted, "note": "best-effort insertion; no spanning guarantee",
            "lengths": [len(f.edges) for f in factors]}
