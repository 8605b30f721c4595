"""Rainbow copy families: exact enumeration, uniform sampling, and the condition audit."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import NonRainbowMember
from ..graph_core import EdgeColouredGraph
from ..pattern_count import PatternGraph, rainbow_embeddings


@dataclass
class CopyFamily:
    """K rainbow copies of F. ``verts[k, x]`` is the image of pattern vertex x,
    ``edge_ids[k, j]`` the graph edge playing pattern edge j."""

    pattern: PatternGraph
    verts: np.ndarray
    edge_ids: np.ndarray
    colours: np.ndarray
    exact: bool
    draws: int = 0

    @property
    def size(self) -> int:
        return int(self.verts.shape[0])

    def edge_sets(self) -> list:
        return [tuple(int(x) for x in row) for row in np.sort(self.edge_ids, axis=1)]


def edge_keys(G: EdgeColouredGraph) -> np.ndarray:
    """Sorted keys u*n+v of G's edges; position equals edge id."""
    return G.edges[:, 0] * G.n + G.edges[:, 1]


def lookup_edges(G: EdgeColouredGraph, a: np.ndarray, b: np.ndarray):
    """Edge ids of the pairs (a, b) and a mask of which pairs are edges."""
    keys = edge_keys(G)
    q = np.minimum(a, b) * G.n + np.maximum(a, b)
    if keys.size == 0:
        return np.zeros(q.shape, dtype=np.int64), np.zeros(q.shape, dtype=bool)
    idx = np.searchsorted(keys, q)
    idx = np.minimum(idx, keys.size - 1)
    return idx, (keys[idx] == q) & (a != b)


def _rows_distinct(X: np.ndarray) -> np.ndarray:
    if X.shape[1] < 2:
        return np.ones(X.shape[0], dtype=bool)
    S = np.sort(X, axis=1)
    return np.all(S[:, 1:] != S[:, :-1], axis=1)


def family_from_embeddings(G: EdgeColouredGraph, F: PatternGraph, emb: np.ndarray, exact: bool,
                           draws: int = 0) -> CopyFamily:
    """Attach edge ids and colours, drop repeated copies (keeping first occurrences)
    and reject non-rainbow rows."""
    emb = np.asarray(emb, dtype=np.int64).reshape(-1, F.f)
    pe = np.asarray(F.edges, dtype=np.int64).reshape(-1, 2)
    ids, ok = lookup_edges(G, emb[:, pe[:, 0]], emb[:, pe[:, 1]])
    if not np.all(ok):
        raise ValueError("embedding uses a non-edge")
    cols = G.colours[ids]
    if not np.all(_rows_distinct(cols)):
        raise NonRainbowMember("family member repeats a colour")
    if emb.shape[0]:
        canon = np.sort(ids, axis=1)
        _, first = np.unique(canon, axis=0, return_index=True)
        first = np.sort(first)
        emb, ids, cols = emb[first], ids[first], cols[first]
    return CopyFamily(F, emb, ids, cols, exact, draws)


def _tree_order(F: PatternGraph):
    """Vertex order in which every vertex except component roots has an earlier neighbour.
    Returns (order, parent) with parent -1 for roots."""
    order, parent, placed = [], [], set()
    for root in range(F.f):
        if root in placed:
            continue
        order.append(root)
        parent.append(-1)
        placed.add(root)
        frontier = [root]
        while frontier:
            x = frontier.pop(0)
            for y in sorted(F.nbrs[x]):
                if y not in placed:
                    placed.add(y)
                    order.append(y)
                    parent.append(x)
                    frontier.append(y)
    return order, parent


def sample_embeddings(G: EdgeColouredGraph, F: PatternGraph, target: int, rng: np.random.Generator,
                      batch: int = 20_000, max_draws: Optional[int] = None) -> CopyFamily:
    """Uniform sample of distinct rainbow copies.

    Embeddings are proposed along a spanning forest of F (roots uniform, children
    uniform among the parent's neighbours) and accepted with probability
    prod deg(parent) / Delta^(#tree edges), which makes every embedding equally
    likely. Distinct copies are kept in draw order, so truncation stays uniform.
    """
    n = G.n
    deg = G.degrees.astype(np.int64)
    Delta = int(deg.max()) if n else 0
    order, parent = _tree_order(F)
    if Delta == 0 or F.h == 0:
        return family_from_embeddings(G, F, np.zeros((0, F.f), dtype=np.int64), exact=False)
    nbr = np.full((n, Delta), -1, dtype=np.int64)
    for v, row in enumerate(G.adjacency):
        ks = sorted(row)
        nbr[v, :len(ks)] = ks
    pe = np.asarray(F.edges, dtype=np.int64)
    max_draws = max_draws if max_draws is not None else max(200_000, 200 * target)
    chunks, seen, total = [], set(), 0
    draws = 0
    while total < target and draws < max_draws:
        B = min(batch, max_draws - draws)
        draws += B
        emb = np.empty((B, F.f), dtype=np.int64)
        logw = np.zeros(B)
        for x, par in zip(order, parent):
            if par < 0:
                emb[:, x] = rng.integers(0, n, B)
            else:
                p = emb[:, par]
                dp = deg[p]
                j = (rng.random(B) * np.maximum(dp, 1)).astype(np.int64)
                emb[:, x] = nbr[p, j]
                logw += np.log(np.maximum(dp, 1) / Delta)
        ok = np.all(emb >= 0, axis=1) & _rows_distinct(emb)
        ok &= np.log(rng.random(B)) < logw
        ids, isedge = lookup_edges(G, emb[:, pe[:, 0]], emb[:, pe[:, 1]])
        ok &= np.all(isedge, axis=1)
        ok &= _rows_distinct(np.where(isedge, G.colours[ids], -1 - np.arange(pe.shape[0])))
        emb, ids = emb[ok], ids[ok]
        if emb.shape[0] == 0:
            continue
        canon = np.sort(ids, axis=1)
        _, first = np.unique(canon, axis=0, return_index=True)
        first = np.sort(first)
        for k in first.tolist():
            key = canon[k].tobytes()
            if key not in seen:
                seen.add(key)
                chunks.append(emb[k])
                total += 1
                if total >= target:
                    break
    out = np.array(chunks, dtype=np.int64).reshape(-1, F.f)
    return family_from_embeddings(G, F, out, exact=False, draws=draws)


def estimate_embeddings(G: EdgeColouredGraph, F: PatternGraph) -> float:
    n = G.n
    if n == 0:
        return 0.0
    d = G.density()
    return float(n) ** F.f * d ** F.h


def build_family(G: EdgeColouredGraph, F: PatternGraph, target: int, rng: np.random.Generator,
                 exact_limit: int = 20_000) -> CopyFamily:
    """All rainbow copies when the embedding count is small, else a uniform sample of ``target``."""
    if estimate_embeddings(G, F) <= exact_limit:
        emb = rainbow_embeddings(G, F)
        fam = family_from_embeddings(G, F, np.array(emb, dtype=np.int64).reshape(-1, F.f), exact=True)
        if fam.size > target:
            keep = np.sort(rng.choice(fam.size, size=target, replace=False))
            fam = CopyFamily(F, fam.verts[keep], fam.edge_ids[keep], fam.colours[keep], False)
        return fam
    return sample_embeddings(G, F, target, rng)


def pair_family(G: EdgeColouredGraph, target: int, rng: np.random.Generator, exact_limit: int = 20_000) -> CopyFamily:
    """Pairs of disjoint edges of distinct colours, built from edge pairs directly."""
    from ..pattern_count import matching

    F = matching(2)
    E = G.num_edges
    total_pairs = E * (E - 1) // 2
    if total_pairs <= exact_limit:
        i, j = np.triu_indices(E, 1)
    else:
        draws = 0
        picks = []
        got = 0
        while got < 3 * target and draws < 50 * target + 100_000:
            B = 4 * target
            draws += B
            a = rng.integers(0, E, B)
            b = rng.integers(0, E, B)
            picks.append(np.stack([a, b], axis=1))
            got += B
        ab = np.concatenate(picks) if picks else np.zeros((0, 2), dtype=np.int64)
        i, j = ab[:, 0], ab[:, 1]
    ei, ej = G.edges[i], G.edges[j]
    ok = (i != j) & (G.colours[i] != G.colours[j])
    ok &= (ei[:, 0] != ej[:, 0]) & (ei[:, 0] != ej[:, 1]) & (ei[:, 1] != ej[:, 0]) & (ei[:, 1] != ej[:, 1])
    i, j = i[ok], j[ok]
    emb = np.concatenate([G.edges[i], G.edges[j]], axis=1)
    fam = family_from_embeddings(G, F, emb, exact=total_pairs <= exact_limit, draws=int(i.size))
    if fam.size > target:
        if fam.exact:
            keep = np.sort(rng.choice(fam.size, size=target, replace=False))
        else:
            keep = np.arange(target)
        fam = CopyFamily(F, fam.verts[keep], fam.edge_ids[keep], fam.colours[keep], False, fam.draws)
    return fam


# condition audit

def _max_pair_count(cols: np.ndarray, universe: int) -> int:
    """Max number of rows containing a fixed unordered pair of entries (rows hold distinct values)."""
    K, w = cols.shape
    if K == 0 or w < 2:
        return 0
    a_idx, b_idx = np.triu_indices(w, 1)
    A, B = cols[:, a_idx].ravel(), cols[:, b_idx].ravel()
    keys = np.minimum(A, B) * universe + np.maximum(A, B)
    if universe * universe <= 4_000_000:
        return int(np.bincount(keys, minlength=1).max())
    _, cnt = np.unique(keys, return_counts=True)
    return int(cnt.max())


def _max_cross_count(X: np.ndarray, Y: np.ndarray, uy: int) -> int:
    """Max number of rows containing a fixed (x, y) with x from X-row and y from Y-row."""
    if X.shape[0] == 0:
        return 0
    keys = (X[:, :, None] * uy + Y[:, None, :]).ravel()
    _, cnt = np.unique(keys, return_counts=True)
    return int(cnt.max())


def audit_family(G: EdgeColouredGraph, fam: CopyFamily, t: int, eps: float) -> dict:
    """Exact family counts behind the family conditions A1-A5 (incidence, pair and ratio bounds)."""
    n, m, E = G.n, G.m, G.num_edges
    Fv = np.bincount(fam.verts.ravel(), minlength=n)
    Fc = np.bincount(fam.colours.ravel(), minlength=m)
    Fe = np.bincount(fam.edge_ids.ravel(), minlength=E)
    min_v = int(Fv.min()) if n else 0
    max_c = int(Fc.max()) if m else 0
    min_e = int(Fe.min()) if E else 0
    max_e = int(Fe.max()) if E else 0
    vv = _max_pair_count(fam.verts, n)
    vc = _max_cross_count(fam.verts, fam.colours, m)
    cc = _max_pair_count(fam.colours, m)
    ee = _max_pair_count(fam.edge_ids, E)
    a1 = max(vv, vc, cc)
    with np.errstate(divide="ignore"):
        ratio_lo = min_v / max_e if max_e else math.inf
        ratio_hi = int(Fv.max()) / min_e if min_e else math.inf
    log_bound = 10.0 / eps * math.log(max(n, 2))
    return {
        "family_size": fam.size,
        "exact_family": fam.exact,
        "t": t,
        "eps": eps,
        "min_vertex_count": min_v,
        "max_colour_count": max_c,
        "min_edge_count": min_e,
        "max_edge_count": max_e,
        "max_pair_counts": {"vv": vv, "vc": vc, "cc": cc, "ee": ee},
        "A1": bool(a1 <= eps * min_v),
        "A2": bool(min_v >= (1 - eps) * max_c),
        "A3": bool((1 - eps) * ratio_hi <= t <= (1 + eps) * ratio_lo) if math.isfinite(ratio_hi) else False,
        "A4": bool(min_e >= log_bound),
        "A4_bound": log_bound,
        "A5": bool(eps * min_e >= ee),
    }
