"""Hypothesis strategies for small edge-coloured graphs and arrays."""
import itertools

import numpy as np
from hypothesis import strategies as st

from rainbowdecomp.graph_core import build_graph


@st.composite
def coloured_graphs(draw, min_n=2, max_n=9, max_colours=6, min_edges=0):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, min_size=min(min_edges, len(pairs)),
                           max_size=len(pairs)))
    cols = draw(st.lists(st.integers(0, max_colours - 1), min_size=len(chosen), max_size=len(chosen)))
    return build_graph(n, [(u, v, c) for (u, v), c in zip(chosen, cols)])


@st.composite
def dense_proper_graphs(draw, min_n=6, max_n=14):
    """Random subgraph of the round-robin colouring of K_n (n even)."""
    from rainbowdecomp.generators import kn_proper

    n = 2 * draw(st.integers(min_n // 2, max_n // 2))
    G = kn_proper(n, draw(st.integers(0, 2**16)))
    keep = draw(st.lists(st.booleans(), min_size=G.num_edges, max_size=G.num_edges))
    trip = [t for t, k in zip(G.triples(), keep) if k]
    return build_graph(n, trip) if trip else G


@st.composite
def symbol_arrays(draw, min_n=1, max_n=6, symbols=None):
    n = draw(st.integers(min_n, max_n))
    k = symbols or n
    vals = draw(st.lists(st.integers(0, k - 1), min_size=n * n, max_size=n * n))
    return np.array(vals, dtype=np.int64).reshape(n, n)
