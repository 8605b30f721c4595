"""Independent checker for decompositions; reports failures with witnesses and never raises."""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field

import numpy as np

from ..graph_core import EdgeColouredGraph
from ..pattern_count import PatternGraph
from .types import Decomposition

STRUCTURAL = ("well_formed", "edges_in_host", "colours_match", "rainbow", "internal_structure", "edge_disjoint")


@dataclass
class VerifyReport:
    checks: dict
    metrics: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks.values())

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": self.checks, "metrics": self.metrics}


def _ok():
    return {"passed": True, "witness": None}


def _fail(witness):
    return {"passed": False, "witness": witness}


def _simple_cycle(edges) -> tuple:
    if len(edges) < 3:
        return False, f"only {len(edges)} edges"
    adj = defaultdict(list)
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    bad = [v for v, nb in adj.items() if len(nb) != 2]
    if bad:
        return False, {"vertex": bad[0], "degree": len(adj[bad[0]])}
    start = next(iter(adj))
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if len(seen) != len(adj):
        return False, {"components": "more than one", "reached": len(seen), "vertices": len(adj)}
    return True, None


def _factor_structure(kind: str, k: int, f, pattern, n_arr) -> tuple:
    edges = [tuple(e) for e in f.edges]
    if kind == "cycle":
        ok, w = _simple_cycle(edges)
        return ok, None if ok else {"factor": k, "detail": w}
    if kind in ("matching", "transversal"):
        cnt = Counter(x for e in edges for x in e)
        rep = [x for x, c in cnt.items() if c > 1]
        if rep:
            return False, {"factor": k, "vertex_repeated": rep[0]}
        if kind == "transversal" and n_arr is not None:
            rows = [u for u, _ in edges]
            cols = [v - n_arr for _, v in edges]
            if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
                return False, {"factor": k, "detail": "row or column repeated"}
        return True, None
    # F-factor: copies vertex-disjoint and edges exactly the union of pattern images
    if not f.copies:
        return True, None
    seen = set()
    for cp in f.copies:
        for x in cp:
            if x in seen:
                return False, {"factor": k, "vertex_in_two_copies": x}
            seen.add(x)
    if pattern is not None:
        implied = set()
        for cp in f.copies:
            if len(cp) != pattern.f:
                return False, {"factor": k, "copy": list(cp), "detail": "copy size differs from pattern"}
            for a, b in pattern.edges:
                u, v = cp[a], cp[b]
                implied.add((min(u, v), max(u, v)))
        listed = {(min(u, v), max(u, v)) for u, v in edges}
        if implied != listed:
            diff = sorted(implied ^ listed)[:1]
            return False, {"factor": k, "edge_not_from_copies": list(diff[0]) if diff else None}
    return True, None


def verify_decomposition(host, D: Decomposition) -> VerifyReport:
    """``host`` is an EdgeColouredGraph, or an n x n symbol array for transversal kinds.

    Colours in D are dense colour ids for graphs and raw symbols for arrays.
    """
    checks = {name: _ok() for name in STRUCTURAL}
    metrics: dict = {}
    try:
        if isinstance(host, EdgeColouredGraph):
            G, A, n_arr = host, None, None
            N = G.n
            total_edges = G.num_edges
        else:
            A = np.asarray(host)
            n_arr = A.shape[0]
            G = None
            N = 2 * n_arr
            total_edges = n_arr * n_arr
        pattern = PatternGraph.from_dict(D.pattern) if (D.pattern and D.kind == "F-factor") else None
    except Exception as exc:  # noqa: BLE001 -- the verifier reports instead of raising
        checks["well_formed"] = _fail(f"unusable host or pattern: {exc}")
        return VerifyReport(checks, metrics)

    owner: dict = {}
    coverage = []
    used = 0
    for k, f in enumerate(D.factors):
        try:
            if len(f.edges) != len(f.colours):
                raise ValueError("edges and colours differ in length")
            edges = []
            for e in f.edges:
                u, v = int(e[0]), int(e[1])
                if u == v:
                    raise ValueError(f"loop at {u}")
                edges.append((min(u, v), max(u, v)))
            cols = [c for c in f.colours]
        except Exception as exc:  # noqa: BLE001
            if checks["well_formed"]["passed"]:
                checks["well_formed"] = _fail({"factor": k, "error": str(exc)})
            continue
        for (u, v), c in zip(edges, cols):
            if G is not None:
                inside = 0 <= u < N and 0 <= v < N and G.has_edge(u, v)
                actual = G.colour(u, v) if inside else None
            else:
                inside = 0 <= u < n_arr <= v < 2 * n_arr
                actual = int(A[u, v - n_arr]) if inside else None
            if not inside:
                if checks["edges_in_host"]["passed"]:
                    checks["edges_in_host"] = _fail({"factor": k, "edge": [u, v]})
                continue
            if actual != c and checks["colours_match"]["passed"]:
                checks["colours_match"] = _fail({"factor": k, "edge": [u, v], "listed": c, "actual": actual})
            if (u, v) in owner and owner[(u, v)] != k and checks["edge_disjoint"]["passed"]:
                checks["edge_disjoint"] = _fail({"edge": [u, v], "factors": [owner[(u, v)], k]})
            owner.setdefault((u, v), k)
        cc = Counter(cols)
        dup = [c for c, m in cc.items() if m > 1]
        if dup and checks["rainbow"]["passed"]:
            wit = [list(e) for e, c in zip(edges, cols) if c == dup[0]]
            checks["rainbow"] = _fail({"factor": k, "colour": dup[0], "edges": wit})
        if len(set(edges)) != len(edges) and checks["edge_disjoint"]["passed"]:
            checks["edge_disjoint"] = _fail({"factor": k, "detail": "edge listed twice"})
        try:
            ok, wit = _factor_structure(D.kind, k, f, pattern, n_arr)
        except Exception as exc:  # noqa: BLE001
            ok, wit = False, {"factor": k, "error": str(exc)}
        if not ok and checks["internal_structure"]["passed"]:
            checks["internal_structure"] = _fail(wit)
        verts = {x for e in edges for x in e}
        coverage.append(len(verts) / N if N else 0.0)
        used += len(edges)
    if D.kind not in ("F-factor", "matching", "cycle", "transversal") and checks["well_formed"]["passed"]:
        checks["well_formed"] = _fail(f"unknown kind {D.kind!r}")
    metrics["factors"] = len(D.factors)
    metrics["edge_coverage"] = len(owner) / total_edges if total_edges else 0.0
    metrics["per_factor_coverage"] = coverage
    metrics["min_factor_coverage"] = min(coverage) if coverage else 0.0
    return VerifyReport(checks, metrics)
