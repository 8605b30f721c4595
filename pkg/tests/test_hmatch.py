import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rainbowdecomp.designs import resolvable_design
from rainbowdecomp.errors import CapExceeded, CoverageNotReached, InputError
from rainbowdecomp.hmatch import (MultiHypergraph, defect_matching, matching_family, nibble_matching,
                                  nibble_partition, read_hypergraph, regularize, write_hypergraph)
from rainbowdecomp.rng import stream


def complete_edges(n):
    return MultiHypergraph(n, np.array(list(itertools.combinations(range(n), 2))), 2)


def near_regular_3uniform(N=300, layers=40, seed=12345):
    rng = np.random.default_rng(seed)
    return MultiHypergraph(N, np.vstack([rng.permutation(N).reshape(-1, 3) for _ in range(layers)]), 3)


@st.composite
def hypergraphs(draw, max_n=14, max_e=40):
    r = draw(st.integers(2, 4))
    N = draw(st.integers(r, max_n))
    rows = draw(st.lists(st.lists(st.integers(0, N - 1), min_size=r, max_size=r, unique=True),
                         min_size=1, max_size=max_e))
    return MultiHypergraph(N, np.array(rows), r)


def is_partition(H, fam):
    allE = np.sort(np.concatenate(fam.matchings)) if fam.matchings else np.zeros(0)
    return np.array_equal(allE, np.arange(H.num_edges)) and all(H.is_matching(m) for m in fam.matchings)


def test_constructor_rejects_bad_input():
    with pytest.raises(InputError):
        MultiHypergraph(3, [[0, 0]])
    with pytest.raises(InputError):
        MultiHypergraph(3, [[0, 5]])


def test_k8_partition():
    H = complete_edges(8)
    fam = nibble_partition(H, seed=0, inflation_cap=1.6)
    assert is_partition(H, fam) and len(fam.matchings) <= 11
    assert len(fam.matchings) == 8


def test_single_edge_partition():
    H = MultiHypergraph(2, [[0, 1]])
    assert len(nibble_partition(H, warn_eps=1.0).matchings) == 1


def test_near_regular_3uniform_partition():
    H = near_regular_3uniform()
    assert H.max_degree == 40
    sizes = [len(nibble_partition(H, seed=s).matchings) for s in range(20)]
    assert max(sizes) <= 1.3 * H.max_degree
    assert max(sizes) == 50


def test_cap_exceeded_carries_count():
    H = complete_edges(8)
    with pytest.raises(CapExceeded) as exc:
        nibble_partition(H, inflation_cap=0.5, consolidate=False)
    assert exc.value.achieved >= 7


def test_regular_input_unchanged():
    H = complete_edges(8)
    H2, log = regularize(H, 0.1)
    assert H2 is H and log.empty


def test_regularize_patches_isolated_vertex():
    e = np.array([x for x in itertools.combinations(range(8), 2) if 7 not in x])
    H = MultiHypergraph(8, e, 2)
    H2, log = regularize(H, 0.5, range(8), fallback=True)
    # K_8 minus a vertex star leaves K_7, so Delta is 6
    assert H.max_degree == 6
    assert H2.degrees[7] == H.max_degree
    assert log.stage2_edges == 6
    assert np.array_equal(H2.edges[:H.num_edges], H.edges)


def test_regularize_star_uses_factorization_gadgets():
    star = [[0, i] for i in range(1, 21)]
    H = MultiHypergraph(21, star, 2)
    H2, log = regularize(H, 0.25, range(21), fallback=True)
    assert log.stage1_iterations >= 1 and log.stage1_edges > 0
    assert log.checks["degree_floor"]


def test_defect_matching_examples():
    D = resolvable_design(3, 1)
    H = MultiHypergraph(9, D.blocks(), 3)
    cls = D.blocks()[:3]
    assert np.all(H.covered([D.blocks().index(b) for b in cls]))
    r = defect_matching(complete_edges(100), range(100), 0.1, seed=0)
    assert r.matching.size >= 45 and r.reached
    r = defect_matching(complete_edges(10), [], 0.1, seed=0)
    assert r.coverage == 1.0


def test_defect_matching_strict_raises():
    H = MultiHypergraph(6, [[0, 1], [0, 2], [0, 3]], 2)
    with pytest.raises(CoverageNotReached):
        defect_matching(H, range(4), 0.1, seed=0, attempts=2)


def test_matching_family_examples():
    H = complete_edges(50)
    fam = matching_family(H, range(50), 0.2, seed=0)
    assert len(fam.matchings) >= 0.8 * 49
    assert all(H.covered(m).sum() >= 40 for m in fam.matchings)
    F = resolvable_design(2, 4)
    H = MultiHypergraph(F.b, F.blocks(), 2)
    blocks = F.blocks()
    for cls in F.classes:
        assert H.covered([blocks.index(b) for b in cls]).all()
    fam = matching_family(H, range(F.b), 0.3, seed=1)
    assert len(fam.matchings) >= 0.7 * H.max_degree
    assert all(H.covered(m).sum() >= 0.7 * F.b for m in fam.matchings)


def test_codegree_warning():
    H = MultiHypergraph(4, [[0, 1, 2]] * 5 + [[1, 2, 3]], 3)
    with pytest.warns(RuntimeWarning):
        nibble_partition(H, warn_eps=0.1)


def test_text_roundtrip():
    H = near_regular_3uniform(30, 4, 1)
    assert np.array_equal(read_hypergraph(write_hypergraph(H)).edges, H.edges)


@given(hypergraphs(), st.integers(0, 10_000))
def test_nibble_partition_is_partition(H, seed):
    fam = nibble_partition(H, seed=seed, inflation_cap=100.0, warn_eps=10.0)
    assert is_partition(H, fam)


@given(hypergraphs(), st.integers(0, 10_000))
def test_nibble_matching_is_maximal(H, seed):
    m = nibble_matching(H, stream(seed, "test"))
    assert H.is_matching(m)
    cov = H.covered(m)
    assert all(cov[H.edges[e]].any() for e in range(H.num_edges))


@given(hypergraphs(max_n=12, max_e=30), st.sampled_from([0.25, 0.5]), st.integers(0, 1000))
def test_regularize_keeps_original_edges_and_floor(H, eps, seed):
    H2, log = regularize(H, eps, seed=seed, fallback=True)
    assert np.array_equal(H2.edges[:H.num_edges], H.edges)
    if not any("impossible" in n for n in log.notes):
        assert H2.degrees.min() >= (1 - eps) * H.max_degree - 1e-9


@given(hypergraphs(), st.floats(0.05, 0.9), st.integers(0, 1000))
def test_defect_matching_returns_original_edges(H, delta, seed):
    r = defect_matching(H, range(H.N), delta, seed=seed, attempts=3, strict=False)
    assert r.matching.size == 0 or r.matching.max() < H.num_edges
    assert H.is_matching(r.matching)
