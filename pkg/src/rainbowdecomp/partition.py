"""Random vertex and colour partitions, the quasirandom-to-superregular preprocessing
step, and concentration statistics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import BadDistribution, InputError, RetriesExhausted
from .graph_core import EdgeColouredGraph, induced_subgraph
from .regularity import (clean_graph, codegree_matrix, mono_codegree_matrix, quasirandom_check,
                         superregular_check, within)
from .rng import stream

_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Partition:
    """Element ``x`` lies in part ``part_of[x]``; ``-1`` marks unassigned elements."""

    universe: int
    part_of: np.ndarray
    p: tuple
    seed: Optional[int] = None

    @property
    def r(self) -> int:
        return len(self.p)

    def parts(self) -> list:
        order = np.argsort(self.part_of, kind="stable")
        srt = self.part_of[order]
        return [order[np.searchsorted(srt, i):np.searchsorted(srt, i, side="right")] for i in range(self.r)]

    def sizes(self) -> np.ndarray:
        return np.bincount(self.part_of[self.part_of >= 0], minlength=self.r)

    def unassigned(self) -> np.ndarray:
        return np.flatnonzero(self.part_of < 0)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Partition) and self.universe == other.universe and self.p == other.p
                and np.array_equal(self.part_of, other.part_of))


def _check_distribution(p) -> tuple:
    p = tuple(float(x) for x in p)
    if not p:
        raise BadDistribution("empty distribution")
    if any(x < 0 or not math.isfinite(x) for x in p):
        raise BadDistribution(f"negative or non-finite probability in {p}")
    if sum(p) > 1 + 1e-12:
        raise BadDistribution(f"probabilities sum to {sum(p)} > 1")
    return p


def random_partition(N: int, p: Sequence[float], seed: int) -> Partition:
    """Each element independently joins part i with probability p_i, else stays unassigned."""
    p = _check_distribution(p)
    rng = stream(seed, "partition.random")
    u = rng.random(int(N))
    cum = np.cumsum(p)
    if abs(cum[-1] - 1.0) <= 1e-12:
        cum[-1] = 1.0 + 1e-9
    part = np.searchsorted(cum, u, side="right").astype(np.int64)
    part[part >= len(p)] = -1
    return Partition(int(N), part, p, int(seed))


def write_partition(P: Partition, target=None) -> str:
    lines = [f"# n={P.universe} p={','.join(repr(x) for x in P.p)} seed={P.seed}"]
    lines += [f"{i} {int(j)}" for i, j in enumerate(P.part_of.tolist())]
    text = "\n".join(lines) + "\n"
    if target is not None:
        with open(target, "w") as fh:
            fh.write(text)
    return text


def read_partition(source) -> Partition:
    text = source if "\n" in str(source) else open(source).read()
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise InputError("partition file needs a '# n=.. p=.. seed=..' header")
    fields = dict(tok.split("=", 1) for tok in lines[0][1:].split())
    n = int(fields["n"])
    p = tuple(float(x) for x in fields["p"].split(","))
    seed = None if fields.get("seed", "None") == "None" else int(fields["seed"])
    part = np.full(n, -1, dtype=np.int64)
    for ln in lines[1:]:
        a, b = ln.split()
        part[int(a)] = int(b)
    return Partition(n, part, p, seed)


# qr-to-sr

@dataclass
class SRReport:
    attempts: int
    passed: bool
    conditions: dict
    history: list = field(default_factory=list)
    removed_edges: int = 0

    def to_dict(self) -> dict:
        return {"attempts": self.attempts, "passed": self.passed, "conditions": self.conditions,
                "history": self.history, "removed_edges": self.removed_edges}


def _sr_conditions(G: EdgeColouredGraph, P: Partition, zeta: float, d: float, sr_samples: int, seed: int) -> dict:
    n = G.n
    parts = P.parts()
    out = {}
    sizes = np.array([pp.size for pp in parts], dtype=float)
    expect = np.array(P.p) * n
    out["A1"] = bool(np.all(within(sizes, expect, zeta * expect)))

    a2 = True
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            if parts[i].size == 0 or parts[j].size == 0:
                a2 = False
                continue
            rep = superregular_check(G, parts[i], parts[j], zeta, d, mode="sampled",
                                     samples=sr_samples, seed=seed)
            a2 = a2 and rep.passes
    out["A2"] = bool(a2)

    a3 = True
    if G.num_edges:
        u, v = G.edges[:, 0], G.edges[:, 1]
        for pp in parts:
            if pp.size == 0:
                a3 = False
                break
            cod = codegree_matrix(G, pp)[u, v]
            mono = mono_codegree_matrix(G, pp)[u, v]
            if not (np.all(within(cod, d * d * pp.size, zeta * pp.size)) and np.all(mono <= zeta * pp.size + _TOL)):
                a3 = False
                break
    out["A3"] = bool(a3)

    a4 = True
    for pp in parts:
        if pp.size < 2:
            a4 = False
            break
        H, _ = induced_subgraph(G, pp)
        if not quasirandom_check(H, zeta, d).passes:
            a4 = False
            break
    out["A4"] = bool(a4)
    return out


def qr_to_sr(G: EdgeColouredGraph, p: Sequence[float], zeta: float, d: float, max_retries: int = 10,
             seed: int = 0, clean_eps: Optional[float] = None, clean_ell: Optional[float] = None,
             sr_samples: int = 200, strict: bool = True):
    """Clean G, then resample vertex partitions until conditions A1-A4 hold.

    Returns ``(cleaned graph, partition, report)``. Attempt ``k`` uses seed
    ``seed + k``. With ``strict=False`` the attempt passing the most conditions
    is returned instead of raising.
    """
    p = _check_distribution(p)
    n = G.n
    if min(p) < n ** -0.5 - _TOL:
        raise InputError(f"every p_i must be at least n^(-1/2) = {n ** -0.5:.4f}")
    eps_c = zeta if clean_eps is None else clean_eps
    ell_c = math.floor(zeta * n) + 1 if clean_ell is None else clean_ell
    Gc = clean_graph(G, eps_c, d, max(1, ell_c))
    history = []
    best = None
    for attempt in range(max_retries):
        P = random_partition(n, p, seed + attempt)
        cond = _sr_conditions(Gc, P, zeta, d, sr_samples, seed + attempt)
        history.append(cond)
        score = sum(cond.values())
        if best is None or score > best[0]:
            best = (score, P, cond)
        if all(cond.values()):
            rep = SRReport(attempt + 1, True, cond, history, G.num_edges - Gc.num_edges)
            return Gc, P, rep
    rep = SRReport(max_retries, False, best[2], history, G.num_edges - Gc.num_edges)
    if strict:
        failing = sorted(k for k, ok in history[-1].items() if not ok)
        raise RetriesExhausted(f"no partition satisfied all conditions; last failing: {failing}", rep)
    return Gc, best[1], rep


# concentration statistics

@dataclass
class EdgeStats:
    p: tuple
    n: int
    total_edges: int
    counts: np.ndarray  # r x r, diagonal = inside part, off-diagonal = cross (symmetric)
    per_colour: Optional[np.ndarray] = None  # m x r x r

    def band(self, zeta: float) -> dict:
        """Compare counts to 2 p_i p_j e(G) +- zeta p_i p_j n and p_i^2 e(G) +- zeta p_i^2 n."""
        r = len(self.p)
        rows = []
        ok = True
        for i in range(r):
            for j in range(i, r):
                pi, pj = self.p[i], self.p[j]
                if i == j:
                    centre, radius = pi * pi * self.total_edges, zeta * pi * pi * self.n
                else:
                    centre, radius = 2 * pi * pj * self.total_edges, zeta * pi * pj * self.n
                got = int(self.counts[i, j])
                inside = bool(abs(got - centre) <= radius + _TOL)
                ok = ok and inside
                rows.append({"i": i, "j": j, "count": got, "centre": centre, "radius": radius, "inside": inside})
        return {"inside": ok, "rows": rows}


def partition_edge_stats(G: EdgeColouredGraph, P: Partition, per_colour: bool = False) -> EdgeStats:
    """Exact e(G[V_i, V_j]) and e(G[V_i]), optionally split by colour."""
    if P.universe != G.n:
        raise InputError("partition universe differs from vertex count")
    r = P.r
    counts = np.zeros((r, r), dtype=np.int64)
    pc = np.zeros((G.m, r, r), dtype=np.int64) if per_colour else None
    if G.num_edges:
        a = P.part_of[G.edges[:, 0]]
        b = P.part_of[G.edges[:, 1]]
        ok = (a >= 0) & (b >= 0)
        lo, hi = np.minimum(a[ok], b[ok]), np.maximum(a[ok], b[ok])
        np.add.at(counts, (lo, hi), 1)
        if per_colour:
            np.add.at(pc, (G.colours[ok], lo, hi), 1)
    counts = counts + np.triu(counts, 1).T
    if per_colour:
        pc = pc + np.transpose(np.triu(pc, 1), (0, 2, 1))
    return EdgeStats(P.p, G.n, G.num_edges, counts, pc)


@dataclass
class ColourPartitionStats:
    count: int
    prediction: float
    family_size: int
    violations: list

    @property
    def hypotheses_ok(self) -> bool:
        return not self.violations


def colour_partition_stats(G: EdgeColouredGraph, family: Sequence[Sequence[int]], U: Sequence[int],
                           colour_partition: Partition, j: int) -> ColourPartitionStats:
    """Number of family members (edge-id tuples) coloured entirely inside I_j.

    Hypothesis violations (non-rainbow member, edge inside U) are reported,
    not raised.
    """
    members = [np.asarray(list(m), dtype=np.int64) for m in family]
    if colour_partition.universe != G.m:
        raise InputError("colour partition universe differs from colour count")
    Uset = np.zeros(G.n, dtype=bool)
    Uset[np.asarray(list(U), dtype=np.int64)] = True
    violations = []
    count = 0
    if members and len({m.size for m in members}) == 1:
        ids = np.stack(members)
        cols = G.colours[ids]
        srt = np.sort(cols, axis=1)
        nonrb = np.flatnonzero((srt[:, 1:] == srt[:, :-1]).any(axis=1))
        ends = G.edges[ids]
        inside = np.flatnonzero((Uset[ends[..., 0]] & Uset[ends[..., 1]]).any(axis=1))
        bad = [(int(k), 0, "non-rainbow member") for k in nonrb] + [(int(k), 1, "U not independent") for k in inside]
        violations.extend((k, why) for k, _, why in sorted(bad))
        count = int(np.count_nonzero((colour_partition.part_of[cols] == j).all(axis=1)))
    else:
        for k, ids in enumerate(members):
            cols = G.colours[ids]
            if np.unique(cols).size != cols.size:
                violations.append((k, "non-rainbow member"))
            ends = G.edges[ids]
            if np.any(Uset[ends[:, 0]] & Uset[ends[:, 1]]):
                violations.append((k, "U not independent"))
            if np.all(colour_partition.part_of[cols] == j):
                count += 1
    h = members[0].size if members else 0
    pred = colour_partition.p[j] ** h * len(members)
    return ColourPartitionStats(count, float(pred), len(members), violations)
