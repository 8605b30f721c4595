"""Quasirandomness and superregularity audits, irregularity graphs and cleaning."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import EmptyPart, PartsOverlap
from .graph_core import EdgeColouredGraph, edge_subgraph
from .rng import stream

# float slack for "a = b +- c" comparisons on exact integer data
_TOL = 1e-9

EXACT_SUBSET_CUTOFF = 14


def within(a, centre, radius):
    """Elementwise test of ``a = centre +- radius`` with float slack."""
    return np.abs(np.asarray(a, dtype=float) - centre) <= radius + _TOL


def codegree_matrix(G: EdgeColouredGraph, cols: Optional[np.ndarray] = None) -> np.ndarray:
    """Codegree matrix; with ``cols`` only common neighbours inside ``cols`` count."""
    a = G.adjacency_matrix
    if cols is None:
        prod = a @ a
    else:
        sub = a[:, cols]
        prod = sub @ sub.T
    return np.rint(prod).astype(np.int64)


def mono_codegree_matrix(G: EdgeColouredGraph, centres: Optional[np.ndarray] = None) -> np.ndarray:
    """Matrix of monochromatic codegrees c(u, v), zero diagonal.

    With ``centres`` (vertex array) only common neighbours in that set count.
    """
    n = G.n
    out = np.zeros((n, n), dtype=np.int64)
    if G.num_edges == 0:
        return out
    e, c = G.edges, G.colours
    # half-edges grouped by (centre w, colour)
    centre = np.concatenate([e[:, 0], e[:, 1]])
    other = np.concatenate([e[:, 1], e[:, 0]])
    col = np.concatenate([c, c])
    if centres is not None:
        keep = np.zeros(n, dtype=bool)
        keep[np.asarray(centres, dtype=np.int64)] = True
        sel = keep[centre]
        centre, other, col = centre[sel], other[sel], col[sel]
        if centre.size == 0:
            return out
    key = centre * G.m + col
    order = np.lexsort((other, key))
    key, other = key[order], other[order]
    starts = np.flatnonzero(np.r_[True, key[1:] != key[:-1]])
    sizes = np.diff(np.r_[starts, key.size])
    for s in np.unique(sizes[sizes >= 2]):
        grp = starts[sizes == s]
        members = other[grp[:, None] + np.arange(s)[None, :]]
        iu, ju = np.triu_indices(int(s), k=1)
        a = members[:, iu].ravel()
        b = members[:, ju].ravel()
        np.add.at(out, (a, b), 1)
    return out + out.T


@dataclass(frozen=True)
class QuasirandomReport:
    n: int
    eps: float
    d: float
    d_hat: float
    eps_degree: float
    bad_pair_count: float
    passes: bool
    sampled: bool
    samples: int = 0
    seed: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "n": self.n, "eps": self.eps, "d": self.d, "d_hat": self.d_hat,
            "eps_degree": self.eps_degree, "bad_pair_count": self.bad_pair_count,
            "passes": self.passes, "sampled": self.sampled, "samples": self.samples,
            "seed": self.seed,
        }


def quasirandom_check(G: EdgeColouredGraph, eps: float, d: float, mode: str = "exact",
                      samples: int = 0, seed: Optional[int] = None) -> QuasirandomReport:
    """Audit (eps, d)-quasirandomness.

    ``mode="sampled"`` estimates the bad-pair count from ``samples`` uniform
    unordered pairs; degrees are always checked exactly.
    """
    if not (0 < d <= 1) or eps <= 0:
        raise ValueError("need 0 < d <= 1 and eps > 0")
    n = G.n
    deg = G.degrees.astype(float)
    eps_degree = float(np.max(np.abs(deg / n - d))) if n else 0.0
    centre, radius = d * d * n, eps * n
    if mode == "exact":
        cod = codegree_matrix(G)
        iu, ju = np.triu_indices(n, k=1)
        bad = float(np.count_nonzero(~within(cod[iu, ju], centre, radius)))
        sampled, k = False, 0
    elif mode == "sampled":
        if samples < 1:
            raise ValueError("sampled mode needs samples >= 1")
        rng = stream(0 if seed is None else seed, "regularity.sampled")
        u = rng.integers(0, n, size=samples)
        v = rng.integers(0, n - 1, size=samples)
        v = v + (v >= u)
        a = G.adjacency_matrix
        cod = np.einsum("ij,ij->i", a[u], a[v])
        frac = np.count_nonzero(~within(cod, centre, radius)) / samples
        bad = float(frac * n * (n - 1) / 2)
        sampled, k = True, int(samples)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    passes = bool(eps_degree <= eps + _TOL and bad <= eps * n * n)
    return QuasirandomReport(n=n, eps=float(eps), d=float(d), d_hat=G.density(), eps_degree=eps_degree,
                             bad_pair_count=bad, passes=passes, sampled=sampled, samples=k,
                             seed=seed if sampled else None)


@dataclass(frozen=True)
class SuperregularReport:
    degree_ok: bool
    worst_degree_dev: float
    density_ok: bool
    worst_density_dev: float
    passes: bool
    sampled: bool
    codegree_bad_pairs: int
    codegree_certificate: bool
    samples: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _check_parts(G, U, W):
    U = np.unique(np.asarray(list(U), dtype=np.int64))
    W = np.unique(np.asarray(list(W), dtype=np.int64))
    if U.size == 0 or W.size == 0:
        raise EmptyPart("both parts must be nonempty")
    if np.intersect1d(U, W).size:
        raise PartsOverlap("parts must be disjoint")
    if U.min() < 0 or W.min() < 0 or max(U.max(), W.max()) >= G.n:
        raise ValueError("part vertex out of range")
    return U, W


def _exact_density_dev(B: np.ndarray, eps: float, d: float) -> float:
    """Largest |e(X,Y)/|X||Y| - d| over admissible subsets; rows of B index the small side."""
    s, t = B.shape
    min_x = int(np.ceil(eps * s - _TOL))
    min_y = max(1, int(np.ceil(eps * t - _TOL)))
    masks = np.arange(1, 1 << s, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(s)[None, :]) & 1).astype(np.float64)
    sizes = bits.sum(axis=1)
    keep = sizes >= max(1, min_x)
    bits, sizes = bits[keep], sizes[keep]
    worst = 0.0
    ks = np.arange(1, t + 1, dtype=np.float64)
    chunk = max(1, 4_000_000 // max(t, 1))
    for lo in range(0, bits.shape[0], chunk):
        dx = bits[lo:lo + chunk] @ B  # rows: X, cols: y -> d_X(y)
        dx.sort(axis=1)
        low = np.cumsum(dx, axis=1)
        high = np.cumsum(dx[:, ::-1], axis=1)
        denom = sizes[lo:lo + chunk, None] * ks[None, :]
        dev = np.maximum(np.abs(high / denom - d), np.abs(low / denom - d))[:, min_y - 1:]
        if dev.size:
            worst = max(worst, float(dev.max()))
    return worst


def superregular_check(G: EdgeColouredGraph, U: Sequence[int], W: Sequence[int], eps: float, d: float,
                       mode: str = "auto", samples: int = 2000, seed: Optional[int] = None) -> SuperregularReport:
    """Audit (eps, d)-superregularity of the bipartite graph G[U, W].

    Exact subset enumeration runs only when the smaller part has at most 14
    vertices; otherwise random subsets at the threshold sizes are tested and the
    report is flagged ``sampled``.
    """
    U, W = _check_parts(G, U, W)
    B = G.adjacency_matrix[np.ix_(U, W)].astype(np.float64)
    du, dw = B.sum(axis=1), B.sum(axis=0)
    dev_u = np.abs(du / W.size - d)
    dev_w = np.abs(dw / U.size - d)
    worst_deg = float(max(dev_u.max(), dev_w.max()))
    degree_ok = worst_deg <= eps + _TOL

    small, large = (B, B.T) if U.size <= W.size else (B.T, B)
    if mode == "auto":
        mode = "exact" if small.shape[0] <= EXACT_SUBSET_CUTOFF else "sampled"
    if mode == "exact":
        if small.shape[0] > EXACT_SUBSET_CUTOFF:
            raise ValueError(f"exact mode limited to parts of size <= {EXACT_SUBSET_CUTOFF}")
        worst_den = _exact_density_dev(small, eps, d)
        sampled, k = False, 0
    elif mode == "sampled":
        rng = stream(0 if seed is None else seed, "regularity.superregular")
        sx = max(1, int(np.ceil(eps * U.size - _TOL)))
        sy = max(1, int(np.ceil(eps * W.size - _TOL)))
        worst_den = 0.0
        for _ in range(samples):
            X = rng.choice(U.size, size=sx, replace=False)
            Y = rng.choice(W.size, size=sy, replace=False)
            worst_den = max(worst_den, abs(B[np.ix_(X, Y)].mean() - d))
        sampled, k = True, int(samples)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    density_ok = worst_den <= eps + _TOL

    # codegree criterion on the smaller side, informational
    n_small = small.shape[0]
    cod = small @ small.T
    iu, ju = np.triu_indices(n_small, k=1)
    bad = int(np.count_nonzero(~within(cod[iu, ju], d * d * small.shape[1], eps * small.shape[1])))
    small_dev = np.abs(small.sum(axis=1) / small.shape[1] - d)
    cert = bool(bad <= eps * n_small ** 2 and np.count_nonzero(small_dev > eps + _TOL) <= eps * n_small)

    return SuperregularReport(degree_ok=bool(degree_ok), worst_degree_dev=worst_deg, density_ok=bool(density_ok),
                              worst_density_dev=float(worst_den), passes=bool(degree_ok and density_ok),
                              sampled=sampled, codegree_bad_pairs=bad, codegree_certificate=cert, samples=k)


@dataclass(frozen=True)
class IrregularityGraph:
    n: int
    pairs: np.ndarray
    kind: str
    params: dict = field(default_factory=dict)
    same_part: Optional[np.ndarray] = None

    @property
    def num_edges(self) -> int:
        return int(self.pairs.shape[0])

    def degrees(self) -> np.ndarray:
        return np.bincount(self.pairs.ravel(), minlength=self.n)

    def max_degree(self) -> int:
        return int(self.degrees().max()) if self.n else 0

    def pair_set(self) -> set:
        return {(int(a), int(b)) for a, b in self.pairs.tolist()}

    def summary(self) -> dict:
        out = {"kind": self.kind, "edges": self.num_edges, "max_degree": self.max_degree(), **self.params}
        if self.same_part is not None:
            out["same_part_edges"] = int(np.count_nonzero(self.same_part))
            out["cross_part_edges"] = int(self.num_edges - np.count_nonzero(self.same_part))
        return out


def _upper_pairs(mask: np.ndarray) -> np.ndarray:
    iu, ju = np.nonzero(np.triu(mask, k=1))
    return np.stack([iu, ju], axis=1).astype(np.int64)


def irregularity_graph(G: EdgeColouredGraph, eps: float, d: float,
                       partition: Optional[Sequence[Sequence[int]]] = None) -> IrregularityGraph:
    """Pairs with codegree outside (d^2 +- eps) n.

    With ``partition`` the partite rule applies: u in V_j, v in V_j' (j = j'
    allowed) is bad when its codegree into some third part V_j'' is outside
    (d^2 +- eps)|V_j''|. Vertices outside every part are never flagged.
    """
    n = G.n
    if partition is None:
        bad = ~within(codegree_matrix(G), d * d * n, eps * n)
        return IrregularityGraph(n, _upper_pairs(bad), "codegree", {"eps": eps, "d": d})
    parts = [np.asarray(sorted(int(v) for v in p), dtype=np.int64) for p in partition]
    part_of = np.full(n, -1, dtype=np.int64)
    for j, p in enumerate(parts):
        if np.any(part_of[p] >= 0):
            raise PartsOverlap("partition classes overlap")
        part_of[p] = j
    r = len(parts)
    bad = np.zeros((n, n), dtype=bool)
    for k, p in enumerate(parts):
        if p.size == 0:
            continue
        cod = codegree_matrix(G, p)
        wrong = ~within(cod, d * d * p.size, eps * p.size)
        # the third part must differ from both endpoint parts
        eligible = (part_of >= 0) & (part_of != k)
        bad |= wrong & eligible[:, None] & eligible[None, :]
    pairs = _upper_pairs(bad)
    same = part_of[pairs[:, 0]] == part_of[pairs[:, 1]] if pairs.size else np.zeros(0, dtype=bool)
    return IrregularityGraph(n, pairs, "partite-codegree", {"eps": eps, "d": d, "parts": r}, same_part=same)


def colour_irregularity_graph(G: EdgeColouredGraph, ell_threshold: float) -> IrregularityGraph:
    """Pairs whose monochromatic codegree is at least ``ell_threshold``."""
    if ell_threshold < 1:
        raise ValueError("ell_threshold must be >= 1")
    mono = mono_codegree_matrix(G)
    return IrregularityGraph(G.n, _upper_pairs(mono >= ell_threshold - _TOL), "colour",
                             {"ell": float(ell_threshold)})


@dataclass(frozen=True)
class CleanReport:
    removed_edges: int
    rounds: int
    initial_edges: int

    @property
    def removed_fraction(self) -> float:
        return self.removed_edges / self.initial_edges if self.initial_edges else 0.0


def _edge_violations(G: EdgeColouredGraph, eps: float, d: float, ell_threshold: float) -> np.ndarray:
    if G.num_edges == 0:
        return np.zeros(0, dtype=bool)
    u, v = G.edges[:, 0], G.edges[:, 1]
    cod = codegree_matrix(G)[u, v]
    mono = mono_codegree_matrix(G)[u, v]
    return ~within(cod, d * d * G.n, eps * G.n) | (mono >= ell_threshold - _TOL)


def clean_graph(G: EdgeColouredGraph, eps: float, d: float, ell_threshold: float,
                max_rounds: int = 20, return_report: bool = False):
    """Delete edges lying in Ir_G(eps, d) or the colour irregularity graph.

    Deletion changes codegrees, so the rule is reapplied until no surviving edge
    violates either bound in the returned graph itself.
    """
    H = G
    rounds = 0
    while rounds < max_rounds:
        viol = _edge_violations(H, eps, d, ell_threshold)
        if not viol.any():
            break
        H = edge_subgraph(H, ~viol)
        rounds += 1
    rep = CleanReport(removed_edges=G.num_edges - H.num_edges, rounds=rounds, initial_edges=G.num_edges)
    return (H, rep) if return_report else H
