import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rainbowdecomp.errors import DuplicateEdge, EmptyGraph, FormatError, SelfLoop, VertexOutOfRange
from rainbowdecomp.generators import array_to_graph, kn_proper, latin_cyclic
from rainbowdecomp.graph_core import (boundedness, build_graph, colour_subgraph, induced_subgraph, mono_codegree,
                                      read_graph, write_graph)
from strategies import coloured_graphs

K4_PROPER = [(0, 1, 0), (2, 3, 0), (0, 2, 1), (1, 3, 1), (0, 3, 2), (1, 2, 2)]


def test_rainbow_triangle():
    G = build_graph(3, [(0, 1, 0), (1, 2, 1), (0, 2, 2)])
    assert G.m == 3 and G.num_edges == 3


def test_construction_errors():
    with pytest.raises(SelfLoop):
        build_graph(2, [(0, 0, 0)])
    with pytest.raises(DuplicateEdge):
        build_graph(3, [(0, 1, 0), (1, 0, 1)])
    with pytest.raises(VertexOutOfRange):
        build_graph(2, [(0, 2, 0)])


def test_k4_factorization_classes():
    G = build_graph(4, K4_PROPER)
    assert np.bincount(G.colours).tolist() == [2, 2, 2]


def test_boundedness_examples():
    assert (boundedness(build_graph(4, K4_PROPER)).g, boundedness(build_graph(4, K4_PROPER)).ell) == (2, 1)
    mono = build_graph(3, [(0, 1, 0), (1, 2, 0), (0, 2, 0)])
    rep = boundedness(mono)
    assert (rep.g, rep.ell) == (3, 2)
    rep = boundedness(array_to_graph(latin_cyclic(5)))
    assert (rep.g, rep.ell) == (5, 1)
    with pytest.raises(EmptyGraph):
        boundedness(build_graph(3, []))


def test_colour_subgraph_examples():
    G = build_graph(4, K4_PROPER)
    assert colour_subgraph(G, range(G.m)).num_edges == 6
    assert colour_subgraph(G, []).num_edges == 0
    H = colour_subgraph(G, [0])
    assert H.n == 4 and sorted(map(tuple, H.edges.tolist())) == [(0, 1), (2, 3)]


def test_mono_codegree_examples():
    mono = build_graph(3, [(0, 1, 0), (1, 2, 0), (0, 2, 0)])
    assert mono_codegree(mono, 0, 1) == (1, {2})
    G = build_graph(4, [(0, 2, 7), (1, 2, 7), (0, 3, 7), (1, 3, 8)])
    assert mono_codegree(G, 0, 1) == (1, {2})


def test_text_roundtrip_and_format_errors():
    G = build_graph(4, [(0, 1, 10), (1, 2, 30), (2, 3, 10)])
    H = read_graph(write_graph(G))
    assert H.triples() == G.triples()
    with pytest.raises(FormatError):
        read_graph("3 1\n0 1 0 9\n")
    with pytest.raises(FormatError):
        read_graph("3 2\n0 1 0\n")


@given(coloured_graphs(min_edges=1))
def test_boundedness_witnesses_attain(G):
    rep = boundedness(G)
    sizes = np.bincount(G.colours, minlength=G.m)
    assert sizes.max() == rep.g == sizes[rep.worst_colour]
    local = sum(1 for u, v in G.edges.tolist() if rep.worst_vertex in (u, v)
                and G.colour(u, v) == rep.worst_local_colour)
    assert local == rep.ell


@given(coloured_graphs(), st.data())
def test_colour_subgraphs_partition_edges(G, data):
    labels = data.draw(st.lists(st.integers(0, 2), min_size=G.m, max_size=G.m))
    parts = [[c for c in range(G.m) if labels[c] == k] for k in range(3)]
    subs = [set(map(tuple, colour_subgraph(G, p).edges.tolist())) for p in parts]
    assert sum(len(s) for s in subs) == G.num_edges
    assert set().union(*subs) == set(map(tuple, G.edges.tolist()))


@given(coloured_graphs(min_n=3))
def test_mono_codegree_symmetric(G):
    for u, v in itertools.combinations(range(G.n), 2):
        assert mono_codegree(G, u, v) == mono_codegree(G, v, u)


@given(st.integers(2, 16), st.integers(0, 1000))
def test_proper_colouring_has_zero_mono_codegree(n, seed):
    G = kn_proper(n, seed)
    for u, v in itertools.combinations(range(n), 2):
        assert mono_codegree(G, u, v)[0] == 0


@given(coloured_graphs(min_n=3))
def test_induced_subgraph_keeps_inside_edges(G):
    keep = list(range(0, G.n, 2))
    H, names = induced_subgraph(G, keep)
    inside = {(u, v) for u, v in G.edges.tolist() if u in keep and v in keep}
    assert {(int(names[a]), int(names[b])) for a, b in H.edges.tolist()} == inside
