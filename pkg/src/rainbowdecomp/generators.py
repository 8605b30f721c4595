"""Seeded instance generators: coloured complete graphs, coloured G(n, p), Latin squares."""
from __future__ import annotations

from typing import Optional

import numpy as np

from .designs import one_factorization
from .errors import InfeasibleParams
from .graph_core import EdgeColouredGraph, boundedness, from_edge_arrays
from .rng import stream

KINDS = ("kn-proper", "kn-bounded", "gnp-coloured", "latin-cyclic", "latin-random")


def kn_proper(n: int, seed: int = 0) -> EdgeColouredGraph:
    """Proper colouring of K_n from a round-robin 1-factorization, randomly relabelled.

    Odd n uses K_{n+1} with one vertex deleted.
    """
    if n < 2:
        raise InfeasibleParams("kn-proper needs n >= 2")
    rng = stream(seed, "generators.kn_proper")
    b = n if n % 2 == 0 else n + 1
    design = one_factorization(b)
    edges, cols = [], []
    for c, cls in enumerate(design.classes):
        for u, v in cls:
            if u < n and v < n:
                edges.append((u, v))
                cols.append(c)
    vperm = rng.permutation(n)
    cperm = rng.permutation(len(design.classes))
    e = vperm[np.asarray(edges)]
    return from_edge_arrays(n, e, cperm[np.asarray(cols)])


def _first_fit(n: int, edges: np.ndarray, g: int, ell: int) -> np.ndarray:
    """Colour edges in the given order with the least colour respecting both caps."""
    size: list = []
    full = 0
    local = [dict() for _ in range(n)]
    vmask = [0] * n
    out = np.empty(edges.shape[0], dtype=np.int64)
    for k, (u, v) in enumerate(edges.tolist()):
        blocked = full | vmask[u] | vmask[v]
        c = 0
        while (blocked >> c) & 1:
            c += 1
        if c == len(size):
            size.append(0)
        size[c] += 1
        if size[c] >= g:
            full |= 1 << c
        for x in (u, v):
            cnt = local[x].get(c, 0) + 1
            local[x][c] = cnt
            if cnt >= ell:
                vmask[x] |= 1 << c
        out[k] = c
    return out


def _check_bounds(n: int, g: int, ell: int):
    if g < 1 or ell < 1:
        raise InfeasibleParams("g and ell must be positive")
    if g > (ell * n) // 2:
        raise InfeasibleParams(f"a colour class meeting each vertex at most {ell} times has at most "
                               f"{(ell * n) // 2} edges, below g={g}")


def kn_bounded(n: int, g: int, ell: int, seed: int = 0) -> EdgeColouredGraph:
    """Colouring of K_n with classes of size at most g and local multiplicity at most ell."""
    _check_bounds(n, g, ell)
    rng = stream(seed, "generators.kn_bounded")
    iu, ju = np.triu_indices(n, 1)
    e = np.stack([iu, ju], axis=1)[rng.permutation(iu.size)]
    return from_edge_arrays(n, e, _first_fit(n, e, g, ell))


def gnp_coloured(n: int, p: float, g: int, ell: int, seed: int = 0) -> EdgeColouredGraph:
    """G(n, p) coloured first-fit under the caps g (global) and ell (local)."""
    if not 0 < p <= 1:
        raise InfeasibleParams("p must lie in (0, 1]")
    _check_bounds(n, g, ell)
    rng = stream(seed, "generators.gnp")
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    e = np.stack([iu[keep], ju[keep]], axis=1)
    e = e[rng.permutation(e.shape[0])]
    return from_edge_arrays(n, e, _first_fit(n, e, g, ell))


def latin_cyclic(n: int) -> np.ndarray:
    if n < 1:
        raise InfeasibleParams("order must be positive")
    i = np.arange(n)
    return (i[:, None] + i[None, :]) % n


def latin_random(n: int, seed: int = 0, steps: Optional[int] = None) -> np.ndarray:
    """Jacobson-Matthews walk started from the cyclic square."""
    L = latin_cyclic(n)
    if n < 3:
        return L
    rng = stream(seed, "generators.latin_random")
    M = np.zeros((n, n, n), dtype=np.int8)
    i = np.arange(n)
    M[i[:, None], i[None, :], L] = 1
    steps = n ** 3 if steps is None else steps
    improper = None
    k = 0
    while k < steps or improper is not None:
        k += 1
        if improper is None:
            while True:
                r, c, s = (int(x) for x in rng.integers(0, n, size=3))
                if M[r, c, s] == 0:
                    break
            r2 = int(np.flatnonzero(M[:, c, s] == 1)[0])
            c2 = int(np.flatnonzero(M[r, :, s] == 1)[0])
            s2 = int(np.flatnonzero(M[r, c, :] == 1)[0])
        else:
            r, c, s = improper
            r2 = int(rng.choice(np.flatnonzero(M[:, c, s] == 1)))
            c2 = int(rng.choice(np.flatnonzero(M[r, :, s] == 1)))
            s2 = int(rng.choice(np.flatnonzero(M[r, c, :] == 1)))
        M[r, c, s] += 1
        M[r, c2, s2] += 1
        M[r2, c, s2] += 1
        M[r2, c2, s] += 1
        M[r, c, s2] -= 1
        M[r, c2, s] -= 1
        M[r2, c, s] -= 1
        M[r2, c2, s2] -= 1
        improper = (r2, c2, s2) if M[r2, c2, s2] < 0 else None
    return np.argmax(M, axis=2)


def is_latin(A: np.ndarray) -> bool:
    n = A.shape[0]
    target = list(range(n))
    return all(sorted(row) == target for row in A.tolist()) and all(sorted(col) == target for col in A.T.tolist())


def array_to_graph(A: np.ndarray) -> EdgeColouredGraph:
    """Cell (i, j) with symbol s becomes edge (i, n + j) of colour s in K_{n,n}."""
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[0]
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    e = np.stack([i.ravel(), n + j.ravel()], axis=1)
    return from_edge_arrays(2 * n, e, A.ravel())


def generate(kind: str, n: int, seed: int = 0, p: float = 0.5, g: Optional[int] = None, ell: int = 1):
    """Dispatch on ``kind``; graphs are re-audited by ``boundedness`` before return."""
    if kind == "kn-proper":
        G = kn_proper(n, seed)
    elif kind == "kn-bounded":
        G = kn_bounded(n, g if g is not None else n // 2, ell, seed)
    elif kind == "gnp-coloured":
        G = gnp_coloured(n, p, g if g is not None else max(1, n // 2), ell, seed)
    elif kind == "latin-cyclic":
        return latin_cyclic(n)
    elif kind == "latin-random":
        A = latin_random(n, seed)
        assert is_latin(A)
        return A
    else:
        raise InfeasibleParams(f"unknown generator kind {kind!r}")
    if G.num_edges:
        rep = boundedness(G)
        cap_g = n // 2 if kind == "kn-proper" else g
        cap_l = 1 if kind == "kn-proper" else ell
        if cap_g is not None and rep.g > cap_g or rep.ell > cap_l:
            raise AssertionError(f"generator produced g={rep.g}, ell={rep.ell} above its caps")
    return G
