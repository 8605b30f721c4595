"""Near-spanning rainbow cycles: cycle factors on the main part, special edges, linking."""
from __future__ import annotations

import math
import time
from dataclasses import replace
from typing import Optional

import numpy as np

from ..errors import FamilyTooSmall, InputError, LinkingFailed
from ..graph_core import EdgeColouredGraph, colour_subgraph, induced_subgraph
from ..partition import qr_to_sr, random_partition
from ..pattern_count import cycle
from ..rng import child_seed, stream
from .factors import decompose_F_factors
from .linker import link_fragments
from .types import CycleConfig, Decomposition, Factor


def _special_choice(cycles_per_layer: list, s: int, rng: np.random.Generator) -> list:
    return [rng.integers(0, s, len(cyc)) for cyc in cycles_per_layer]


def _check_AB(G: EdgeColouredGraph, cycles_per_layer, choice, V3, W, I1, cfg: CycleConfig, n: int) -> tuple:
    """Properties A and B for one choice of special edges; also returns each layer's I^i."""
    delta = cfg.delta
    s = cfg.s
    count = np.zeros(G.n, dtype=np.int64)
    Cm = G.colour_matrix
    in_I1 = np.zeros(G.m, dtype=bool)
    in_I1[I1] = True
    sizes = np.bincount(G.colours, minlength=G.m) if G.num_edges else np.zeros(G.m, dtype=np.int64)
    bad_sets, okB = [], True
    for cyc, ch in zip(cycles_per_layer, choice):
        U = []
        for verts, e in zip(cyc, ch.tolist()):
            x, y = verts[e], verts[(e + 1) % s]
            U += [x, y]
        if U:
            np.add.at(count, U, 1)
            sub = Cm[np.ix_(np.asarray(U), W)]
            cols = sub[sub >= 0]
            per = np.bincount(cols, minlength=G.m)
        else:
            per = np.zeros(G.m, dtype=np.int64)
        per = np.where(in_I1, per, 0)
        bad = np.flatnonzero(per > delta * n)
        if per[bad].sum() > delta * per.sum() + 1e-9 or sizes[bad].sum() > delta * n * n:
            okB = False
        bad_sets.append(set(bad.tolist()))
    okA = bool(count[V3].max() <= delta * n) if len(V3) else True
    return okA, okB, bad_sets


def _J(G: EdgeColouredGraph, cyc, ch, bad: set, W, I1set: set, s: int, delta1: float) -> set:
    if not bad:
        return set()
    adj = G.adjacency
    out = set()
    Wset = set(W.tolist())
    for j, (verts, e) in enumerate(zip(cyc, ch.tolist())):
        for z in (verts[e], verts[(e + 1) % s]):
            tot = sum(1 for w, c in adj[z].items() if w in Wset and c in I1set)
            hit = sum(1 for w, c in adj[z].items() if w in Wset and c in bad)
            if hit and hit >= delta1 * tot:
                out.add(j)
    return out


def decompose_near_spanning_cycles(G: EdgeColouredGraph, alpha: Optional[float] = None, s: Optional[int] = None,
                                   seed: int = 0, config: Optional[CycleConfig] = None) -> Decomposition:
    """Edge-disjoint rainbow cycles of length at least (1 - alpha)n.

    Shorter cycles are listed under ``metrics["short_cycles"]`` and not emitted.
    """
    cfg = config or CycleConfig()
    if alpha is not None:
        cfg = replace(cfg, alpha=alpha)
    if s is not None:
        cfg = replace(cfg, s=s)
    s, n = cfg.s, G.n
    if s < 6 or s % 2:
        raise InputError("segment length s must be even and at least 6")
    if n < 10 * s:
        raise InputError(f"n = {n} < 10 s = {10 * s}: segments cannot tile")
    t0 = time.perf_counter()
    need_len = (1 - cfg.alpha) * n
    present = int(np.unique(G.colours).size) if G.num_edges else 0
    if present < math.ceil(need_len - 1e-9) or present < s:
        raise FamilyTooSmall(f"a rainbow cycle of length {need_len:.0f} needs that many colours, {present} present")
    d = cfg.d if cfg.d is not None else G.density()
    p = (cfg.delta1, cfg.delta1, 1 - cfg.gamma)
    Gc, P, sr = qr_to_sr(G, p, cfg.zeta, d, max_retries=cfg.qr_retries, seed=seed, strict=False)
    V1, V2, V3 = P.parts()
    W = np.concatenate([V1, V2])
    CP = random_partition(G.m, (cfg.colour_gamma, 1 - cfg.colour_gamma), seed)
    I1, I2 = CP.parts()
    metrics = {"parts": [int(V1.size), int(V2.size), int(V3.size)], "colour_parts": [int(I1.size), int(I2.size)],
               "qr_to_sr": sr.to_dict(), "target_length": need_len}

    H3, names = induced_subgraph(colour_subgraph(Gc, I2), V3)
    inner_cfg = cfg.inner
    if inner_cfg.layer_cap is None:
        inner_cfg = replace(inner_cfg, layer_cap=int(min(V1.size, V2.size)))
    inner = decompose_F_factors(H3, cycle(s), 1.0, child_seed(stream(seed, "rainbow_decomp.cycles.inner")),
                                inner_cfg)
    metrics["inner"] = {k: inner.metrics.get(k) for k in ("t", "family", "defect", "warnings", "factors",
                                                          "coverage_after_growth")}
    cycles_per_layer = [[tuple(int(names[x]) for x in cp) for cp in f.copies] for f in inner.factors]

    rng = stream(seed, "rainbow_decomp.special")
    best = None
    for attempt in range(1, cfg.special_retries + 1):
        choice = _special_choice(cycles_per_layer, s, rng)
        okA, okB, bad_sets = _check_AB(Gc, cycles_per_layer, choice, V3, W, I1, cfg, n)
        score = int(okA) + int(okB)
        if best is None or score > best[0]:
            best = (score, choice, bad_sets, okA, okB, attempt)
        if okA and okB:
            break
    _, choice, bad_sets, okA, okB, used_attempt = best
    metrics["special_edges"] = {"A": okA, "B": okB, "attempts": used_attempt}

    I1set = set(I1.tolist())
    forbid_base = set() if cfg.borrow_colours else set(I2.tolist())
    blocked: set = set()
    emitted, short, failures, J_sizes = [], [], [], []
    for i, (cyc, ch) in enumerate(zip(cycles_per_layer, choice)):
        J = _J(Gc, cyc, ch, bad_sets[i], W, I1set, s, cfg.delta1)
        J_sizes.append(len(J))
        frags = []
        for j, (verts, e) in enumerate(zip(cyc, ch.tolist())):
            if j in J:
                continue
            frags.append([verts[(e + 1 + q) % s] for q in range(s)])
        if not frags:
            failures.append({"factor": i, "reason": "no fragments left"})
            continue
        link = None
        drops = 0
        while frags:
            frag_cols = set()
            for fr in frags:
                for a, b in zip(fr[:-1], fr[1:]):
                    frag_cols.add(Gc.colour(a, b))
            try:
                link = link_fragments(frags, Gc, V1, V2, forbid_base | bad_sets[i], frag_cols,
                                      seed=child_seed(stream(seed + i, "rainbow_decomp.cycles.link")),
                                      restarts=cfg.link_restarts, blocked_edges=blocked)
                break
            except LinkingFailed as exc:
                if drops >= cfg.drop_retries or len(frags) == 1:
                    failures.append({"factor": i, "reason": str(exc), "fragments": len(frags)})
                    link = None
                    break
                frags.pop(exc.failed_link)
                drops += 1
        if link is None:
            continue
        seq = []
        for fr, (x, a, b, y) in zip(frags, link.links):
            seq += list(fr) + [a, b]
        edges, cols = [], []
        for u, v in zip(seq, seq[1:] + seq[:1]):
            edges.append((min(u, v), max(u, v)))
            cols.append(Gc.colour(u, v))
        length = len(seq)
        if length >= need_len - 1e-9:
            for u, v in link.edges():
                blocked.add((min(u, v), max(u, v)))
            emitted.append(Factor(edges, cols, [tuple(seq)]))
        else:
            short.append({"factor": i, "length": length, "fragments": len(frags)})
    if cfg.experimental_spanning:
        from .spanning import extend_cycles

        metrics["spanning"] = extend_cycles(Gc, emitted, seed)
    used = sum(len(f.edges) for f in emitted)
    metrics.update({
        "factors": len(emitted),
        "cycle_lengths": [len(f.edges) for f in emitted],
        "short_cycles": short,
        "linking_failures": failures,
        "J_sizes": J_sizes,
        "per_factor_coverage": [len(f.edges) / n for f in emitted],
        "edge_coverage": used / G.num_edges if G.num_edges else 0.0,
        "dropped_factors": failures + short,
        "seconds": time.perf_counter() - t0,
    })
    return Decomposition("cycle", emitted, metrics, {"s": s}, seed, cfg.to_dict())
