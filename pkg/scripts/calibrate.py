"""Monte Carlo calibration of the seeded engineering targets.

Prints one JSON object; the test suite freezes the values measured here.
Usage: python scripts/calibrate.py [--only NAME ...] [--seeds K]
"""
from __future__ import annotations

import argparse
import itertools
import json
import sys
import time

import numpy as np

from rainbowdecomp.generators import gnp_coloured, kn_proper, latin_cyclic
from rainbowdecomp.graph_core import from_edge_arrays
from rainbowdecomp.hmatch import MultiHypergraph, defect_matching, matching_family, nibble_partition, regularize
from rainbowdecomp.partition import (colour_partition_stats, partition_edge_stats, qr_to_sr,
                                     random_partition)
from rainbowdecomp.pattern_count import complete, matching, rainbow_embeddings
from rainbowdecomp.rainbow_decomp import (decompose_F_factors, decompose_matchings_sparse,
                                          decompose_near_spanning_cycles, decompose_transversals,
                                          link_fragments, verify_decomposition)
from rainbowdecomp.regularity import quasirandom_check, superregular_check
from rainbowdecomp.errors import LinkingFailed


def near_regular_3uniform(N: int = 300, layers: int = 40, seed: int = 12345) -> MultiHypergraph:
    """Union of ``layers`` random perfect 3-matchings: exactly regular, small codegree."""
    rng = np.random.default_rng(seed)
    return MultiHypergraph(N, np.vstack([rng.permutation(N).reshape(-1, 3) for _ in range(layers)]), 3)


def complete_edge_hypergraph(n: int) -> MultiHypergraph:
    return MultiHypergraph(n, np.array(list(itertools.combinations(range(n), 2))), 2)


def random_bipartite(size: int, p: float, seed: int):
    rng = np.random.default_rng(seed)
    a, b = np.nonzero(rng.random((size, size)) < p)
    e = np.stack([a, size + b], axis=1)
    return from_edge_arrays(2 * size, e, np.arange(e.shape[0]))


def qr_sampled(k):
    ok = [quasirandom_check(gnp_coloured(200, 0.5, 100, 200, s), 0.1, 0.5, mode="sampled", samples=2000,
                            seed=s).passes for s in range(k)]
    return {"pass_rate": float(np.mean(ok))}


def sr_bipartite(k):
    reps = [superregular_check(random_bipartite(100, 0.5, s), range(100), range(100, 200), 0.1, 0.5, seed=s)
            for s in range(k)]
    return {"pass_rate": float(np.mean([r.passes for r in reps])),
            "degree_ok_rate": float(np.mean([r.degree_ok for r in reps]))}


def partition_sizes(k):
    ok = [abs(int(random_partition(10_000, (0.5, 0.5), s).sizes()[0]) - 5000) <= 300 for s in range(k)]
    return {"rate": float(np.mean(ok))}


def qr_to_sr_k500(k):
    G = kn_proper(500, 0)
    hits = []
    for s in range(k):
        _, _, rep = qr_to_sr(G, (0.1, 0.1, 0.8), 0.05, 1.0, max_retries=3, seed=100 * s, strict=False)
        hits.append(rep.passed)
    return {"rate": float(np.mean(hits))}


def edge_band_k1000(k):
    G = kn_proper(1000, 0)
    ok = [partition_edge_stats(G, random_partition(1000, (0.3, 0.7), s)).band(0.1)["inside"] for s in range(k)]
    return {"rate": float(np.mean(ok))}


def colour_split_triangles(k):
    G = kn_proper(300, 0)
    emb = rainbow_embeddings(G, complete(3), fixed={0: 0})
    fam = {tuple(sorted((G.edge_id(a, b), G.edge_id(a, c), G.edge_id(b, c)))) for a, b, c in emb}
    fam = sorted(fam)
    counts = [colour_partition_stats(G, fam, [0], random_partition(G.m, (0.5, 0.5), s), 0).count
              for s in range(k)]
    return {"family": len(fam), "mean": float(np.mean(counts)), "prediction": 0.125 * len(fam)}


def nibble_k8():
    return {"matchings": len(nibble_partition(complete_edge_hypergraph(8), seed=0).matchings)}


def nibble_3uniform(k):
    H = near_regular_3uniform()
    sizes = [len(nibble_partition(H, seed=s).matchings) for s in range(k)]
    return {"Delta": H.max_degree, "max_matchings": max(sizes), "ratio": max(sizes) / H.max_degree}


def regularize_k8():
    e = np.array([x for x in itertools.combinations(range(8), 2) if 7 not in x])
    H = MultiHypergraph(8, e, 2)
    H2, _ = regularize(H, 0.5, range(8), fallback=True, check=False)
    return {"Delta": H.max_degree, "degree_7": int(H2.degrees[7])}


def defect_k100():
    r = defect_matching(complete_edge_hypergraph(100), range(100), 0.1, seed=0)
    return {"size": int(r.matching.size)}


def family_k50():
    H = complete_edge_hypergraph(50)
    fam = matching_family(H, range(50), 0.2, seed=0)
    return {"count": len(fam.matchings), "min_cover": min(int(H.covered(m).sum()) for m in fam.matchings)}


def defect_statistics(k):
    H = near_regular_3uniform()
    freq = np.zeros(H.N)
    worst = 1.0
    for s in range(k):
        r = defect_matching(H, range(H.N), 0.15, seed=s, strict=False)
        freq += H.covered(r.matching)
        worst = min(worst, r.coverage)
    return {"min_vertex_rate": float(freq.min() / k), "min_coverage": worst}


def factors_k60():
    G = kn_proper(60, 0)
    D = decompose_F_factors(G, matching(2), 0.3, seed=0)
    return {"t": D.metrics["t"], "factors": len(D.factors), "min_vertices": min(len(f.vertices) for f in D.factors),
            "verified": verify_decomposition(G, D).passed}


def factors_k100():
    G = kn_proper(100, 0)
    D = decompose_F_factors(G, complete(3), 0.4, seed=0)
    return {"t": D.metrics["t"], "factors": len(D.factors), "verified": verify_decomposition(G, D).passed}


def matchings_k50():
    G = kn_proper(50, 0)
    D = decompose_matchings_sparse(G, 0.1, seed=0)
    big = [f for f in D.factors if len(f.edges) >= 0.9 * 25]
    return {"factors": len(D.factors), "coverage_big": sum(len(f.edges) for f in big) / G.num_edges,
            "verified": verify_decomposition(G, D).passed}


def cycles_k300(k):
    out = []
    for s in range(k):
        G = kn_proper(300, s)
        D = decompose_near_spanning_cycles(G, 0.3, 12, seed=s)
        out.append(len(D.factors))
    return {"min_cycles": min(out), "counts": out}


def linker_k300(k):
    G = kn_proper(300, 0)
    wins = 0
    for s in range(k):
        perm = np.random.default_rng(s).permutation(300)
        V1, V2, rest = perm[:30], perm[30:60], perm[60:]
        frags = [[int(rest[2 * j]), int(rest[2 * j + 1])] for j in range(20)]
        used = {G.colour(a, b) for a, b in frags}
        try:
            link_fragments(frags, G, V1, V2, used_colours=used, seed=s)
            wins += 1
        except LinkingFailed:
            pass
    return {"rate": wins / k}


def transversals_c5(k):
    good = 0
    for s in range(k):
        D = decompose_transversals(latin_cyclic(5), 0.2, seed=s)
        good += sum(len(f.edges) >= 4 for f in D.factors) >= 4
    return {"good_seeds": good}


TASKS = {
    "qr_sampled": lambda k: qr_sampled(k),
    "sr_bipartite": lambda k: sr_bipartite(k),
    "partition_sizes": lambda k: partition_sizes(k),
    "qr_to_sr_k500": lambda k: qr_to_sr_k500(min(k, 20)),
    "edge_band_k1000": lambda k: edge_band_k1000(k),
    "colour_split_triangles": lambda k: colour_split_triangles(k),
    "nibble_k8": lambda k: nibble_k8(),
    "nibble_3uniform": lambda k: nibble_3uniform(min(k, 20)),
    "regularize_k8": lambda k: regularize_k8(),
    "defect_k100": lambda k: defect_k100(),
    "family_k50": lambda k: family_k50(),
    "defect_statistics": lambda k: defect_statistics(2 * k),
    "factors_k60": lambda k: factors_k60(),
    "factors_k100": lambda k: factors_k100(),
    "matchings_k50": lambda k: matchings_k50(),
    "cycles_k300": lambda k: cycles_k300(min(k, 20)),
    "linker_k300": lambda k: linker_k300(k),
    "transversals_c5": lambda k: transversals_c5(min(k, 20)),
}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--only", nargs="*", choices=sorted(TASKS))
    ap.add_argument("--seeds", type=int, default=100, help="Monte Carlo repetitions (default 100)")
    args = ap.parse_args(argv)
    out = {}
    for name in args.only or TASKS:
        t0 = time.perf_counter()
        out[name] = TASKS[name](args.seeds)
        print(f"{name}: {out[name]} ({time.perf_counter() - t0:.1f}s)", file=sys.stderr)
    print(json.dumps(out, indent=1, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
