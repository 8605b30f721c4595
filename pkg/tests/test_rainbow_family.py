import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rainbowdecomp.errors import InputError, NonRainbowMember
from rainbowdecomp.generators import kn_proper
from rainbowdecomp.graph_core import build_graph, colour_subgraph
from rainbowdecomp.pattern_count import complete, count_rainbow, matching, path
from rainbowdecomp.rainbow_decomp.aux import build_aux_hypergraph
from rainbowdecomp.rainbow_decomp.family import (CopyFamily, audit_family, build_family, family_from_embeddings,
                                                 pair_family, sample_embeddings)

from strategies import coloured_graphs

PATTERNS = {"K3": complete(3), "P3": path(3), "2K2": matching(2)}
BIG = 10**9


def exact_family(G, F):
    rng = np.random.default_rng(0)
    fam = pair_family(G, BIG, rng) if F.name == "2K2" else build_family(G, F, BIG, rng, exact_limit=BIG)
    assert fam.exact
    return fam


def test_exact_family_matches_rainbow_count():
    G = kn_proper(12, 0)
    for F in PATTERNS.values():
        assert exact_family(G, F).size == count_rainbow(G, F)


def test_family_members_are_rainbow_and_distinct():
    G = kn_proper(20, 3)
    fam = build_family(G, complete(3), 300, np.random.default_rng(1), exact_limit=BIG)
    assert fam.size == 300 and not fam.exact
    assert len(set(fam.edge_sets())) == fam.size
    assert all(len(set(row)) == 3 for row in fam.colours.tolist())


def test_non_rainbow_embedding_rejected():
    G = build_graph(3, [(0, 1, 0), (1, 2, 0), (0, 2, 1)])
    with pytest.raises(NonRainbowMember):
        family_from_embeddings(G, complete(3), np.array([[0, 1, 2]]), exact=True)


def test_aux_rejects_non_rainbow_family():
    G = build_graph(3, [(0, 1, 0), (1, 2, 0), (0, 2, 1)])
    F = complete(3)
    fam = CopyFamily(F, np.array([[0, 1, 2]]), np.array([[0, 1, 2]]), np.array([[0, 0, 1]]), True)
    with pytest.raises(NonRainbowMember):
        build_aux_hypergraph(G, fam, 2)
    with pytest.raises(InputError):
        build_aux_hypergraph(G, fam, 0)


def test_sampler_is_uniform_on_irregular_graph():
    # irregular host so that unweighted tree proposals would be biased
    G0 = kn_proper(8, 0)
    G = build_graph(8, [t for t in G0.triples() if not (t[0] == 0 and t[1] < 5)])
    F = path(3)
    total = count_rainbow(G, F)
    runs = 3000
    seen = {}
    for s in range(runs):
        fam = sample_embeddings(G, F, 1, np.random.default_rng(s), batch=64)
        key = tuple(sorted(fam.edge_ids[0].tolist()))
        seen[key] = seen.get(key, 0) + 1
    assert len(seen) == total
    mu = runs / total
    assert max(abs(c - mu) for c in seen.values()) <= 5 * np.sqrt(mu)


def test_audit_counts_match_anchor_oracles():
    G = kn_proper(10, 0)
    F = complete(3)
    fam = exact_family(G, F)
    rep = audit_family(G, fam, 3, 0.1)
    per_vertex = [count_rainbow(G, F, anchor=v) for v in range(G.n)]
    per_edge = [count_rainbow(G, F, anchor=(u, v)) for u, v in G.edges.tolist()]
    assert rep["family_size"] == count_rainbow(G, F)
    assert rep["min_vertex_count"] == min(per_vertex)
    assert rep["min_edge_count"] == min(per_edge)
    assert rep["max_edge_count"] == max(per_edge)
    # two edges lie in at most one common triangle
    assert rep["max_pair_counts"]["ee"] == 1


@given(coloured_graphs(min_n=4, max_n=9, max_colours=5, min_edges=3), st.sampled_from(sorted(PATTERNS)),
       st.integers(1, 3))
def test_aux_degrees_match_anchor_counts(G, name, t):
    F = PATTERNS[name]
    fam = exact_family(G, F)
    aux = build_aux_hypergraph(G, fam, t, seed=0)
    H = aux.H
    assert H.N == G.num_edges + G.n * t + G.m * t
    assert H.num_edges == fam.size
    if fam.size:
        assert H.edges.shape[1] == 2 * F.h + F.f
    deg = H.degrees
    E, n, m = G.num_edges, G.n, G.m
    for e, (u, v) in enumerate(G.edges.tolist()):
        assert deg[e] == count_rainbow(G, F, anchor=(u, v))
    vdeg = deg[E:E + n * t].reshape(t, n).sum(axis=0)
    for v in range(n):
        assert vdeg[v] == count_rainbow(G, F, anchor=v)
    cdeg = deg[E + n * t:].reshape(t, m).sum(axis=0)
    whole = count_rainbow(G, F)
    for c in range(m):
        rest = [x for x in range(m) if x != c]
        assert cdeg[c] == whole - count_rainbow(colour_subgraph(G, rest), F)


@given(coloured_graphs(min_n=4, max_n=9, max_colours=5, min_edges=3), st.integers(1, 4), st.integers(0, 50))
def test_aux_hyperedges_hit_one_layer(G, t, seed):
    fam = exact_family(G, complete(3))
    aux = build_aux_hypergraph(G, fam, t, seed=seed)
    for k, row in enumerate(aux.H.edges.tolist()):
        layers = {aux.role(x)[2] for x in row if aux.role(x)[0] != "edge"}
        assert layers == {int(aux.layer_of[k])}
