import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rainbowdecomp.errors import InfeasibleParams
from rainbowdecomp.generators import generate, is_latin, kn_proper, latin_cyclic, latin_random
from rainbowdecomp.graph_core import boundedness


def test_kn_proper_8():
    G = kn_proper(8, 0)
    rep = boundedness(G)
    assert (G.num_edges, rep.g, rep.ell) == (28, 4, 1)


def test_latin_cyclic_5():
    A = latin_cyclic(5)
    assert A.tolist() == [[(i + j) % 5 for j in range(5)] for i in range(5)]


def test_gnp_coloured_respects_caps():
    G = generate("gnp-coloured", 200, seed=0, p=0.5, g=60, ell=3)
    rep = boundedness(G)
    assert rep.g <= 60 and rep.ell <= 3


def test_unknown_kind_and_bad_params():
    with pytest.raises(InfeasibleParams):
        generate("petersen", 10)
    with pytest.raises(InfeasibleParams):
        generate("gnp-coloured", 10, p=0.0)


@given(st.integers(2, 40), st.integers(0, 10_000))
def test_kn_proper_is_proper_complete(n, seed):
    G = kn_proper(n, seed)
    assert G.num_edges == n * (n - 1) // 2
    assert boundedness(G).ell == 1


@given(st.integers(1, 12), st.integers(0, 10_000))
def test_latin_random_is_latin(n, seed):
    assert is_latin(latin_random(n, seed))


@given(st.integers(4, 30), st.integers(1, 10), st.integers(1, 3), st.integers(0, 500))
def test_kn_bounded_respects_caps(n, g, ell, seed):
    try:
        G = generate("kn-bounded", n, seed=seed, g=g, ell=ell)
    except InfeasibleParams:
        return
    rep = boundedness(G)
    assert rep.g <= g and rep.ell <= ell


def test_same_seed_same_instance():
    a = generate("gnp-coloured", 50, seed=3, p=0.3, g=10, ell=2)
    b = generate("gnp-coloured", 50, seed=3, p=0.3, g=10, ell=2)
    assert a.triples() == b.triples()
    assert np.array_equal(latin_random(9, 4), latin_random(9, 4))
