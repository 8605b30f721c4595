import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rainbowdecomp.errors import NoEdges
from rainbowdecomp.generators import generate, kn_proper
from rainbowdecomp.graph_core import build_graph
from rainbowdecomp.pattern_count import (PatternGraph, a_value, automorphisms, complete, count_copies, count_nonrainbow,
                                         count_rainbow, cycle, estimate_rainbow, matching, parse_pattern, path, star)
from strategies import coloured_graphs

K4_PROPER = [(0, 1, 0), (2, 3, 0), (0, 2, 1), (1, 3, 1), (0, 3, 2), (1, 2, 2)]


def brute_embeddings(G, F):
    """Independent oracle: all injective maps checked against the pattern edges."""
    total = rainbow = 0
    for img in itertools.permutations(range(G.n), F.f):
        if all(G.has_edge(img[a], img[b]) for a, b in F.edges):
            total += 1
            cols = [G.colour(img[a], img[b]) for a, b in F.edges]
            rainbow += len(set(cols)) == len(cols)
    return total, rainbow


def test_automorphism_examples():
    assert complete(3).aut == 6
    assert cycle(4).aut == 8
    assert path(2).aut == 2


def test_a_value_examples():
    assert a_value(cycle(6)) == 2 and a_value(cycle(3)) == 2
    assert a_value(star(3)) == 3
    assert a_value(complete(3)) == 2
    with pytest.raises(NoEdges):
        a_value(PatternGraph(3, ()))


def test_count_examples():
    assert count_rainbow(build_graph(3, [(0, 1, 0), (1, 2, 1), (0, 2, 2)]), complete(3)) == 1
    assert count_rainbow(build_graph(3, [(0, 1, 0), (1, 2, 0), (0, 2, 2)]), complete(3)) == 0
    assert count_rainbow(build_graph(4, K4_PROPER), complete(3)) == 4
    mono = build_graph(3, [(0, 1, 0), (1, 2, 0), (0, 2, 0)])
    assert (count_rainbow(mono, complete(3)), count_nonrainbow(mono, complete(3))) == (0, 1)
    # disjoint equal-coloured edge pairs of the K4 factorization
    assert count_nonrainbow(build_graph(4, K4_PROPER), matching(2)) == 3


def test_estimate_examples():
    assert estimate_rainbow(100, 0.3, complete(2), "vertex") == pytest.approx(30.0)
    assert estimate_rainbow(200, 0.5, complete(3), "vertex") == pytest.approx(2500.0)
    assert estimate_rainbow(200, 0.5, complete(3), "edge") == pytest.approx(50.0)


def test_anchored_counts_on_gnp_frozen():
    G = generate("gnp-coloured", 200, seed=0, p=0.5, g=100, ell=1)
    F = complete(3)
    assert count_rainbow(G, F) == 158620
    assert count_rainbow(G, F, anchor=0) + count_nonrainbow(G, F, anchor=0) == count_copies(G, F, anchor=0).total


def test_parse_pattern_presets_and_inline():
    assert parse_pattern("2k2").edges == matching(2).edges
    assert parse_pattern("0-1,1-2,2-0").aut == 6
    assert parse_pattern("c5").f == 5


PATTERNS = [complete(3), path(2), matching(2), cycle(4), star(3)]


@given(coloured_graphs(min_n=3, max_n=7, max_colours=4), st.sampled_from(PATTERNS))
def test_counts_match_brute_force(G, F):
    total, rainbow = brute_embeddings(G, F)
    c = count_copies(G, F)
    assert c.total * F.aut == total
    assert c.rainbow * F.aut == rainbow
    assert c.rainbow + c.nonrainbow == c.total


@given(coloured_graphs(min_n=3, max_n=8, max_colours=5), st.sampled_from(PATTERNS))
def test_anchor_sums(G, F):
    whole = count_rainbow(G, F)
    assert sum(count_rainbow(G, F, anchor=v) for v in range(G.n)) == F.f * whole
    assert sum(count_rainbow(G, F, anchor=(u, v)) for u, v in G.edges.tolist()) == F.h * whole


@given(st.sampled_from(PATTERNS + [complete(4), cycle(5), path(3)]))
def test_pattern_invariants(F):
    assert math.factorial(F.f) % F.aut == 0
    D = max(F.degrees)
    assert D <= a_value(F) <= max(D, 3 * D - 4)


@given(st.integers(6, 16), st.integers(0, 300))
def test_proper_colouring_has_no_nonrainbow_triangles(n, seed):
    assert count_nonrainbow(kn_proper(n, seed), complete(3)) == 0
