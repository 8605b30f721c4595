"""Factor, matching and transversal pipelines built on the auxiliary-hypergraph matching."""
from __future__ import annotations

import math
import random
import time
from dataclasses import replace
from typing import Optional

import numpy as np

from ..errors import FamilyTooSmall, InputError
from ..graph_core import EdgeColouredGraph, boundedness
from ..hmatch import defect_matching
from ..pattern_count import PatternGraph, matching
from ..regularity import clean_graph, quasirandom_check
from ..rng import child_seed, stream
from .aux import build_aux_hypergraph
from .family import CopyFamily, audit_family, build_family, pair_family
from .layers import CopyFinder, EdgePool, Layer, commit, fill_layer, greedy_edges, swap_edges
from .types import DecompConfig, Decomposition, Factor

EXACT_QR_LIMIT = 600


def layer_count(F: PatternGraph, E: int, n: int) -> int:
    return max(1, int(round(F.f * E / (F.h * n)))) if n and F.h else 1


def colours_needed(F: PatternGraph, n: int, alpha: float) -> int:
    return F.h * math.ceil((1 - alpha) * (n // F.f) - 1e-9)


def _precheck(G: EdgeColouredGraph, F: PatternGraph, alpha: float):
    if G.num_edges == 0:
        raise FamilyTooSmall("graph has no edges")
    present = int(np.unique(G.colours).size)
    need = colours_needed(F, G.n, alpha)
    if present < need:
        raise FamilyTooSmall(f"a factor covering (1-alpha)n vertices needs {need} colours, only {present} present")


def _warnings_for(G: EdgeColouredGraph, F: PatternGraph, cfg: DecompConfig, d: float, seed: int) -> tuple:
    warn = []
    mode = "exact" if G.n <= EXACT_QR_LIMIT else "sampled"
    qr = quasirandom_check(G, cfg.eps, d, mode=mode, samples=2000, seed=seed)
    if not qr.passes:
        warn.append(f"input is not ({cfg.eps}, {d:.3f})-quasirandom; proceeding best-effort")
    rep = boundedness(G)
    gbound = (1 + cfg.eps) * F.f * d * G.n / (2 * F.h)
    if rep.g > gbound:
        warn.append(f"colour class size {rep.g} exceeds the global bound {gbound:.1f}")
    if rep.ell > cfg.eps * G.n:
        warn.append(f"local colour multiplicity {rep.ell} exceeds {cfg.eps * G.n:.1f}")
    return warn, qr.to_dict(), rep.to_dict()


def _clean(G: EdgeColouredGraph, cfg: DecompConfig, d: float, warn: list):
    if not cfg.clean:
        return G, 0
    H = clean_graph(G, cfg.zeta, d, math.floor(cfg.zeta * G.n) + 1)
    lost = G.num_edges - H.num_edges
    if lost > cfg.clean_max_loss * G.num_edges:
        warn.append(f"cleaning would remove {lost} of {G.num_edges} edges; skipped")
        return G, 0
    return H, lost


def run_layers(G: EdgeColouredGraph, fam: CopyFamily, t: int, cfg: DecompConfig, seed: int,
               edge_level: bool = False, vertices=None) -> tuple:
    """Hypergraph matching, layer extraction, priority ordering and growth.

    Returns (layers in priority order, metrics). Copies from the matching are
    committed first; layers are then ranked by coverage (the substitution order)
    and filled one after another from the remaining edges.
    """
    metrics: dict = {}
    aux = build_aux_hypergraph(G, fam, t, seed)
    H = aux.H
    metrics["aux"] = {"vertices": H.N, "edges": H.num_edges, "uniformity": H.r,
                      "max_degree": H.max_degree}
    targets = aux.vertex_layer_ids()
    if H.num_edges:
        res = defect_matching(H, targets, cfg.defect_delta, seed=seed, attempts=cfg.defect_attempts,
                              eps=cfg.reg_eps, strict=False, regularize_first=cfg.regularize, theta=cfg.theta)
        chosen = res.matching
        metrics["defect"] = {"coverage": res.coverage, "reached": res.reached, "attempts": res.attempts,
                             "regularize_notes": sorted(set(res.log.notes)) if res.log else []}
    else:
        chosen = np.zeros(0, dtype=np.int64)
        metrics["defect"] = {"coverage": 0.0, "reached": False, "attempts": 0, "regularize_notes": []}
    verts_all = range(G.n) if vertices is None else vertices
    layers = [Layer(i, verts_all) for i in range(t)]
    pool = EdgePool(G)
    pe = fam.pattern.edges
    for k in chosen.tolist():
        vs = fam.verts[k].tolist()
        edges = []
        for j, (a, b) in enumerate(pe):
            u, v = vs[a], vs[b]
            edges.append((min(u, v), max(u, v), int(fam.colours[k, j])))
        L = layers[int(aux.layer_of[k])]
        if edge_level:
            for u, v, c in edges:
                commit(pool, L, (u, v), [(u, v, c)])
        else:
            commit(pool, L, vs, edges)
    metrics["matched_copies"] = int(chosen.size)
    metrics["coverage_after_matching"] = [L.covered for L in layers]
    # substitution order: best-covered layers first
    layers.sort(key=lambda L: (-L.covered, L.index))
    rnd = random.Random(child_seed(stream(seed, "rainbow_decomp.grow")))
    if cfg.augment:
        if edge_level:
            for L in layers:
                greedy_edges(pool, L, rnd)
                for _ in range(cfg.swap_passes):
                    if not L.free or swap_edges(pool, L, rnd, cfg.general_swap_limit) == 0:
                        break
                    greedy_edges(pool, L, rnd)
        else:
            finder = CopyFinder(fam.pattern)
            for L in layers:
                fill_layer(finder, pool, L, rnd, cfg.find_budget, cfg.find_tries, cfg.layer_cap)
    metrics["coverage_after_growth"] = [L.covered for L in layers]
    return layers, metrics


def _to_factor(L: Layer, edge_level: bool) -> Factor:
    edges, cols, copies = [], [], []
    for verts, es in L.copies:
        for u, v, c in es:
            edges.append((u, v))
            cols.append(c)
        copies.append(verts)
    order = sorted(range(len(edges)), key=lambda i: edges[i])
    if edge_level:
        copies = sorted(copies)
    return Factor([edges[i] for i in order], [cols[i] for i in order], copies)


def _finish(kind: str, G0: EdgeColouredGraph, layers: list, threshold: float, edge_level: bool, metrics: dict,
            F: PatternGraph, seed: int, cfg) -> Decomposition:
    emitted, dropped = [], []
    for rank, L in enumerate(layers):
        if L.copies and L.covered >= threshold - 1e-9:
            emitted.append(_to_factor(L, edge_level))
        else:
            dropped.append({"rank": rank, "layer": L.index, "covered": L.covered})
    used = sum(len(f.edges) for f in emitted)
    metrics.update({
        "factors": len(emitted),
        "coverage_threshold": threshold,
        "per_factor_coverage": [len(f.vertices) / G0.n for f in emitted],
        "edge_coverage": used / G0.num_edges if G0.num_edges else 0.0,
        "dropped_factors": dropped,
    })
    return Decomposition(kind, emitted, metrics, F.to_dict(), seed, cfg.to_dict())


def decompose_F_factors(G: EdgeColouredGraph, F: PatternGraph, alpha: Optional[float] = None, seed: int = 0,
                        config: Optional[DecompConfig] = None, vertices=None) -> Decomposition:
    """Edge-disjoint rainbow F-factors; layers covering at least (1 - alpha)n vertices are emitted.

    ``vertices`` restricts coverage accounting to a vertex subset (used by the cycle pipeline).
    """
    cfg = config or DecompConfig()
    if alpha is not None:
        cfg = replace(cfg, alpha=alpha)
    alpha = cfg.alpha
    if not 0 <= alpha <= 1:
        raise InputError("alpha must lie in [0, 1]")
    t0 = time.perf_counter()
    _precheck(G, F, alpha)
    d = cfg.d if cfg.d is not None else G.density()
    warn, qr, bound = _warnings_for(G, F, cfg, d, seed)
    Gw, removed = _clean(G, cfg, d, warn)
    n = G.n
    t = layer_count(F, Gw.num_edges, n)
    budget = int(min(cfg.copy_cap, math.ceil(cfg.copies_per_target * n * t / F.f)))
    rng = stream(seed, "rainbow_decomp.family")
    fam = build_family(Gw, F, budget, rng, cfg.exact_limit)
    if fam.size == 0:
        raise FamilyTooSmall(f"no rainbow copies of {F.name or 'F'} found")
    metrics = {"t": t, "target_factors": (1 - alpha) * t, "warnings": warn, "quasirandom": qr,
               "boundedness": bound, "cleaned_edges": removed,
               "family": {"size": fam.size, "exact": fam.exact, "budget": budget, "draws": fam.draws,
                          "subsampled": not fam.exact}}
    if cfg.audit:
        metrics["audit"] = audit_family(Gw, fam, t, cfg.eps)
    layers, m2 = run_layers(Gw, fam, t, cfg, seed, vertices=vertices)
    metrics.update(m2)
    D = _finish("F-factor", G, layers, (1 - alpha) * n, False, metrics, F, seed, cfg)
    D.metrics["seconds"] = time.perf_counter() - t0
    return D


def decompose_matchings_sparse(G: EdgeColouredGraph, delta: float = 0.1, seed: int = 0,
                               config: Optional[DecompConfig] = None) -> Decomposition:
    """Rainbow matchings covering at least (1 - delta)n vertices each, from the family of
    disjoint distinct-colour edge pairs."""
    cfg = config or DecompConfig()
    if not 0 <= delta <= 1:
        raise InputError("delta must lie in [0, 1]")
    t0 = time.perf_counter()
    F = matching(2)
    if G.num_edges == 0:
        raise FamilyTooSmall("graph has no edges")
    n = G.n
    deg = G.degrees
    r = float(deg.mean())
    warn = []
    rep = boundedness(G)
    if deg.min() < (1 - cfg.eps) * r or deg.max() > (1 + cfg.eps) * r:
        warn.append(f"degrees range over [{int(deg.min())}, {int(deg.max())}], not (1 +- {cfg.eps}) {r:.1f}")
    if rep.g > (1 + cfg.eps) * r:
        warn.append(f"colour class size {rep.g} exceeds (1 + eps) r = {(1 + cfg.eps) * r:.1f}")
    if rep.ell > cfg.eps * r:
        warn.append(f"local colour multiplicity {rep.ell} exceeds eps r = {cfg.eps * r:.1f}")
    t = layer_count(F, G.num_edges, n)
    budget = int(min(cfg.copy_cap, math.ceil(cfg.copies_per_target * n * t / F.f)))
    fam = pair_family(G, budget, stream(seed, "rainbow_decomp.family"), cfg.exact_limit)
    if fam.size == 0:
        raise FamilyTooSmall("no pair of disjoint edges with distinct colours")
    metrics = {"t": t, "target_factors": (1 - 2 * delta) * t, "warnings": warn, "boundedness": rep.to_dict(),
               "family": {"size": fam.size, "exact": fam.exact, "budget": budget, "draws": fam.draws,
                          "subsampled": not fam.exact}}
    if cfg.audit:
        metrics["audit"] = audit_family(G, fam, t, cfg.eps)
    layers, m2 = run_layers(G, fam, t, cfg, seed, edge_level=True)
    metrics.update(m2)
    D = _finish("matching", G, layers, (1 - delta) * n, True, metrics, F, seed, cfg)
    D.metrics["seconds"] = time.perf_counter() - t0
    return D

