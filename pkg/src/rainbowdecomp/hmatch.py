"""Multi-hypergraphs and semi-random matching: nibble partitioning, defect
regularization and randomized near-perfect matchings."""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .designs import _full_design
from .errors import CapExceeded, CoverageNotReached, DesignUnavailable, FormatError, InputError
from .rng import stream


class MultiHypergraph:
    """r-uniform hypergraph on ``range(N)``; ``edges`` is an (E, r) array, duplicates allowed."""

    def __init__(self, N: int, edges, r: Optional[int] = None):
        arr = np.asarray(edges, dtype=np.int64)
        if arr.size == 0:
            arr = np.zeros((0, r or 2), dtype=np.int64)
        if arr.ndim != 2:
            raise InputError("edges must be a 2-d array of vertex ids")
        if r is not None and arr.shape[1] != r:
            raise InputError(f"expected {r}-uniform edges")
        if arr.shape[1] < 2:
            raise InputError("hyperedges need r >= 2")
        arr = np.sort(arr, axis=1)
        if arr.size and (arr.min() < 0 or arr.max() >= N):
            raise InputError("hyperedge vertex out of range")
        if arr.shape[0] and np.any(arr[:, 1:] == arr[:, :-1]):
            raise InputError("hyperedge with a repeated vertex")
        arr.setflags(write=False)
        self.N = int(N)
        self.edges = arr
        self.r = int(arr.shape[1])

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.N)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.N and self.num_edges else 0

    @cached_property
    def max_codegree(self) -> int:
        if self.num_edges == 0:
            return 0
        iu, ju = np.triu_indices(self.r, 1)
        keys = (self.edges[:, iu] * self.N + self.edges[:, ju]).ravel()
        _, c = np.unique(keys, return_counts=True)
        return int(c.max())

    @cached_property
    def incidence(self) -> list:
        """vertex -> array of incident edge indices."""
        flat = self.edges.ravel()
        owner = np.repeat(np.arange(self.num_edges), self.r)
        order = np.argsort(flat, kind="stable")
        bounds = np.searchsorted(flat[order], np.arange(self.N + 1))
        owner = owner[order]
        return [owner[bounds[v]:bounds[v + 1]] for v in range(self.N)]

    def subhypergraph(self, idx) -> "MultiHypergraph":
        return MultiHypergraph(self.N, self.edges[np.asarray(idx, dtype=np.int64)], self.r)

    def is_matching(self, idx) -> bool:
        idx = np.asarray(idx, dtype=np.int64)
        if idx.size == 0:
            return True
        verts = self.edges[idx].ravel()
        return np.unique(verts).size == verts.size

    def covered(self, idx) -> np.ndarray:
        mask = np.zeros(self.N, dtype=bool)
        idx = np.asarray(idx, dtype=np.int64)
        if idx.size:
            mask[self.edges[idx].ravel()] = True
        return mask


def read_hypergraph(source) -> MultiHypergraph:
    text = source if "\n" in str(source) else open(source).read()
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines or len(lines[0]) != 3:
        raise FormatError("header must be 'N r E'")
    N, r, E = (int(x) for x in lines[0])
    body = lines[1:]
    if len(body) != E:
        raise FormatError(f"header declares {E} edges, found {len(body)}")
    if any(len(row) != r for row in body):
        raise FormatError(f"every edge line needs exactly {r} vertex ids")
    return MultiHypergraph(N, [[int(x) for x in row] for row in body] if body else np.zeros((0, r)), r)


def write_hypergraph(H: MultiHypergraph, target=None) -> str:
    lines = [f"{H.N} {H.r} {H.num_edges}"] + [" ".join(map(str, e)) for e in H.edges.tolist()]
    text = "\n".join(lines) + "\n"
    if target is not None:
        with open(target, "w") as fh:
            fh.write(text)
    return text


@dataclass
class MatchingFamily:
    matchings: list
    origin: str
    metrics: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({"origin": self.origin, "matchings": [list(map(int, m)) for m in self.matchings],
                           "metrics": self.metrics})


# nibble

def nibble_matching(H: MultiHypergraph, rng: np.random.Generator, mask: Optional[np.ndarray] = None,
                    theta: float = 0.1, finish_degree: Optional[float] = None) -> np.ndarray:
    """One maximal matching grown by random bites, finished greedily.

    Each round samples surviving edges with probability theta / (current max
    degree), keeps the sampled edges that clash with no other sampled edge and
    deletes every edge touching a newly covered vertex.
    """
    E = H.num_edges
    alive = np.arange(E) if mask is None else np.flatnonzero(mask)
    if alive.size == 0:
        return np.zeros(0, dtype=np.int64)
    edges = H.edges
    covered = np.zeros(H.N, dtype=bool)
    chosen = []
    stop = math.log(max(H.N, 2)) if finish_degree is None else finish_degree
    while alive.size:
        deg = np.bincount(edges[alive].ravel(), minlength=H.N)
        dmax = int(deg.max())
        if dmax <= stop:
            break
        pick = alive[rng.random(alive.size) < min(1.0, theta / dmax)]
        if pick.size:
            cnt = np.bincount(edges[pick].ravel(), minlength=H.N)
            ok = pick[(cnt[edges[pick]] == 1).all(axis=1)]
            if ok.size < 0.5 * pick.size:
                theta = max(theta / 2, 1e-3)
            chosen.append(ok)
            covered[edges[ok].ravel()] = True
            alive = alive[~covered[edges[alive]].any(axis=1)]
    if alive.size:
        order = alive[rng.permutation(alive.size)]
        rows = edges[order].tolist()
        extra = []
        for e, row in zip(order.tolist(), rows):
            if not any(covered[x] for x in row):
                covered[row] = True
                extra.append(e)
        chosen.append(np.asarray(extra, dtype=np.int64))
    return np.sort(np.concatenate(chosen)) if chosen else np.zeros(0, dtype=np.int64)


def _consolidate(H: MultiHypergraph, matchings: list) -> list:
    """Empty the smallest matching into the others while possible.

    Each edge moves directly, or displaces a single clashing edge that itself
    moves to a third matching; a matching that cannot be emptied is restored.
    """
    E = H.edges
    owner = [{x: e for e in m.tolist() for x in E[e].tolist()} for m in matchings]
    alive = list(range(len(matchings)))
    while len(alive) > 1:
        alive.sort(key=lambda k: (len(owner[k]), k))
        victim, others = alive[0], alive[1:]
        snapshot = [dict(owner[k]) for k in others]
        ok = True
        for e in sorted(set(owner[victim].values())):
            row = E[e].tolist()
            if not _place(E, owner, others, e, row):
                ok = False
                break
        if not ok:
            for k, o in zip(others, snapshot):
                owner[k] = o
            break
        owner[victim] = {}
        alive.remove(victim)
    return [np.array(sorted(set(owner[k].values())), dtype=np.int64) for k in sorted(alive)]


def _place(E, owner, others, e, row) -> bool:
    for k in others:
        if not any(x in owner[k] for x in row):
            owner[k].update((x, e) for x in row)
            return True
    for k in others:
        clash = {owner[k][x] for x in row if x in owner[k]}
        if len(clash) != 1:
            continue
        f = clash.pop()
        frow = E[f].tolist()
        for j in others:
            if j != k and not any(x in owner[j] for x in frow):
                for x in frow:
                    del owner[k][x]
                owner[j].update((x, f) for x in frow)
                owner[k].update((x, e) for x in row)
                return True
    return False


def nibble_partition(H: MultiHypergraph, delta: float = 0.1, seed: int = 0, inflation_cap: float = 1.6,
                     theta: float = 0.1, warn_eps: float = 0.5, consolidate: bool = True) -> MatchingFamily:
    """Partition E(H) into matchings: nibble matchings while the remaining maximum
    degree exceeds log N, then first-fit greedy colouring of the leftover edges,
    then (optionally) emptying small matchings by edge moves and single swaps."""
    rng = stream(seed, "hmatch.nibble_partition")
    E, N = H.num_edges, H.N
    Delta = H.max_degree
    if E and E * H.r * H.r <= 50_000_000 and H.max_codegree > warn_eps * Delta:
        warnings.warn("codegree precondition violated: Delta_2 > eps * Delta", RuntimeWarning)
    cap_base = max(Delta, math.ceil(math.log(max(N, 2))))
    cap = inflation_cap * cap_base
    remaining = np.ones(E, dtype=bool)
    matchings: list = []
    stop = math.log(max(N, 2))
    while remaining.any():
        deg = np.bincount(H.edges[remaining].ravel(), minlength=N)
        if deg.max() <= stop:
            break
        m = nibble_matching(H, rng, remaining, theta=theta)
        matchings.append(m)
        remaining[m] = False
    nibble_count = len(matchings)
    # first-fit on leftover edges, canonical index order
    busy = [0] * N
    for k, m in enumerate(matchings):
        bit = 1 << k
        for x in H.edges[m].ravel().tolist():
            busy[x] |= bit
    for e in np.flatnonzero(remaining).tolist():
        row = H.edges[e].tolist()
        occ = 0
        for x in row:
            occ |= busy[x]
        free = ~occ & ((1 << len(matchings)) - 1)
        if free:
            k = (free & -free).bit_length() - 1
            matchings[k] = np.append(matchings[k], e)
        else:
            k = len(matchings)
            matchings.append(np.array([e], dtype=np.int64))
        for x in row:
            busy[x] |= 1 << k
    matchings = [np.sort(m).astype(np.int64) for m in matchings]
    before = len(matchings)
    if consolidate and before > 1:
        matchings = _consolidate(H, matchings)
    achieved = len(matchings)
    metrics = {
        "Delta": Delta, "N": N, "edges": E, "matchings": achieved, "nibble_matchings": nibble_count,
        "before_consolidation": before,
        "target": (1 + delta) * Delta, "cap": cap, "ratio": achieved / Delta if Delta else 0.0,
    }
    fam = MatchingFamily(matchings, "partition", metrics)
    if achieved > cap + 1e-9:
        raise CapExceeded(f"{achieved} matchings exceed cap {cap:.1f}", achieved=achieved)
    return fam


# regularization

@dataclass
class RegularizeLog:
    Delta: int
    stage1_iterations: int = 0
    stage1_edges: int = 0
    stage2_edges: int = 0
    design_degree: int = 0
    design_degree_target: float = 0.0
    notes: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)

    @property
    def empty(self) -> bool:
        return self.stage1_edges == 0 and self.stage2_edges == 0


def _admissible_sizes(r: int, limit: int) -> list:
    out = []
    bp = 0
    while True:
        b = r * (r - 1) * bp + r
        if b > limit:
            break
        out.append(b)
        bp += 1
    return out


def regularize(H: MultiHypergraph, eps: float, V_keep: Optional[Sequence[int]] = None, seed: int = 0,
               fallback: bool = False, check: bool = True):
    """Add design and patch edges so every vertex of ``V_keep`` has degree at least
    (1 - eps) Delta(H). Returns ``(H', log)``; the original edges are the first
    ``H.num_edges`` rows of H'.

    Stage 1 repeatedly places resolvable designs of degree about eps^(-1/2) on
    windows of the low-degree set. Stage 2 attaches each remaining deficient
    vertex to disjoint (r-1)-sets until its degree equals Delta(H).
    """
    rng = stream(seed, "hmatch.regularize")
    r, N = H.r, H.N
    Delta = H.max_degree
    log = RegularizeLog(Delta=Delta)
    scope = np.arange(N) if V_keep is None else np.unique(np.asarray(list(V_keep), dtype=np.int64))
    deg = H.degrees.astype(np.int64).copy()
    floor_ = (1 - eps) * Delta
    added: list = []
    target_deg = eps ** -0.5
    log.design_degree_target = target_deg

    def low_set():
        return scope[deg[scope] < floor_ - 1e-9]

    U = low_set()
    max_iter = Delta + 1
    it = 0
    while U.size > eps * scope.size and it < max_iter:
        admissible = _admissible_sizes(r, U.size)
        if not admissible:
            log.notes.append(f"stage 1 skipped: {U.size} low vertices, fewer than r={r}")
            break
        sizes = [b for b in admissible if _full_design(r, b) is not None]
        if not sizes:
            if not fallback:
                raise DesignUnavailable(f"no resolvable design for r={r}, b in {admissible}")
            log.notes.append(f"stage 1 skipped: no design with r={r}, b <= {U.size}")
            break
        b = sizes[-1]
        full = _full_design(r, b)
        k = max(1, min(full.g, int(round(target_deg))))
        log.design_degree = k
        if k != target_deg:
            log.notes.append(f"design degree {target_deg:.3f} rounded to {k}")
        perm = U[rng.permutation(U.size)]
        # windows of size b covering U; only the last one overlaps its neighbour
        nwin = -(-U.size // b)
        windows = [perm[i * b:(i + 1) * b] for i in range(nwin - 1)] + [perm[-b:]]
        blocks = np.array([blk for cls in full.classes[:k] for blk in cls], dtype=np.int64)
        rows = np.sort(np.stack(windows)[:, blocks].reshape(-1, r), axis=1)
        added.append(rows)
        np.add.at(deg, rows.ravel(), 1)
        log.stage1_edges += len(windows) * blocks.shape[0]
        it += 1
        U = low_set()
    log.stage1_iterations = it

    U = low_set()
    if U.size:
        deficiency = Delta - deg[U]
        others = np.setdiff1d(np.arange(N), U)
        others = others[rng.permutation(others.size)]
        nW = others.size // (r - 1)
        if nW == 0:
            log.notes.append("stage 2 impossible: fewer than r-1 vertices outside the deficient set")
        else:
            W = others[: nW * (r - 1)].reshape(nW, r - 1)
            t = int(deficiency.sum())
            us = np.repeat(U, deficiency)
            added.append(np.sort(np.hstack([W[np.arange(t) % nW], us[:, None]]), axis=1))
            deg[U] = Delta
            log.stage2_edges = t
            log.notes.append(f"stage 2 patched {U.size} vertices with {t} edges over {nW} sets")
    if added:
        H2 = MultiHypergraph(N, np.vstack([H.edges] + added), r)
    else:
        H2 = H
    if check:
        d2 = H2.degrees
        log.checks = {
            "degree_floor": bool(scope.size == 0 or d2[scope].min() >= floor_ - 1e-9),
            "max_degree_cap": bool(H2.max_degree <= (1 + eps ** 0.25) * Delta + 1e-9),
            "codegree_cap": bool(H2.max_codegree <= eps ** 0.25 * Delta + H.max_codegree + 1e-9),
        }
    return H2, log


# defect matching

@dataclass
class DefectResult:
    matching: np.ndarray
    coverage: float
    attempts: int
    reached: bool
    log: Optional[RegularizeLog] = None


def defect_matching(H: MultiHypergraph, V: Sequence[int], delta: float, seed: int = 0, attempts: int = 20,
                    eps: float = 0.5, strict: bool = True, regularize_first: bool = True,
                    theta: float = 0.1) -> DefectResult:
    """Random matching of H covering at least (1 - delta)|V| vertices of V.

    H is regularized on V, a nibble matching of the enlarged hypergraph is drawn,
    and the added edges are stripped. ``strict=False`` returns the best attempt
    instead of raising.
    """
    rng = stream(seed, "hmatch.defect")
    V = np.unique(np.asarray(list(V), dtype=np.int64))
    if regularize_first and H.num_edges:
        H2, log = regularize(H, eps, V, seed=seed, fallback=True, check=False)
    else:
        H2, log = H, None
    E0 = H.num_edges
    need = (1 - delta) * V.size
    best = None
    for k in range(1, attempts + 1):
        m = nibble_matching(H2, rng, theta=theta)
        m = m[m < E0]
        cov = int(H.covered(m)[V].sum()) if V.size else 0
        if best is None or cov > best[1]:
            best = (m, cov)
        if cov >= need - 1e-9:
            return DefectResult(m, cov / V.size if V.size else 1.0, k, True, log)
    res = DefectResult(best[0], best[1] / V.size if V.size else 1.0, attempts, False, log)
    if strict:
        raise CoverageNotReached(f"best coverage {res.coverage:.3f} below {1 - delta:.3f}", best=res)
    return res


def matching_family(H: MultiHypergraph, V: Sequence[int], delta: float, seed: int = 0, eps: float = 0.5,
                    inflation_cap: float = 1.6) -> MatchingFamily:
    """Edge-disjoint matchings of H each covering at least (1 - delta)|V| of V."""
    V = np.unique(np.asarray(list(V), dtype=np.int64))
    H2, log = regularize(H, eps, V, seed=seed, fallback=True, check=False)
    part = nibble_partition(H2, delta, seed, inflation_cap=max(inflation_cap, 10.0))
    E0 = H.num_edges
    keep = []
    for m in part.matchings:
        m = m[m < E0]
        if V.size == 0 or H.covered(m)[V].sum() >= (1 - delta) * V.size - 1e-9:
            keep.append(m)
    metrics = {"target": (1 - delta) * H.max_degree, "achieved": len(keep), "partition_size": len(part.matchings),
               "regularize_notes": log.notes}
    return MatchingFamily(keep, "defect-family", metrics)
