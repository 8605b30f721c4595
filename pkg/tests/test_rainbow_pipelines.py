import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from rainbowdecomp.errors import FamilyTooSmall, InputError, LinkingFailed
from rainbowdecomp.generators import kn_proper, latin_cyclic
from rainbowdecomp.graph_core import build_graph
from rainbowdecomp.pattern_count import complete, matching
from rainbowdecomp.rainbow_decomp import (CycleConfig, Decomposition, Factor, block_partition, block_size,
                                          decompose_F_factors, decompose_matchings_sparse,
                                          decompose_near_spanning_cycles, decompose_transversals, link_fragments,
                                          verify_decomposition)

from strategies import dense_proper_graphs, symbol_arrays


def mono_complete(n):
    return build_graph(n, [(u, v, 0) for u in range(n) for v in range(u + 1, n)])


# F-factors

def test_k60_matching_factors():
    G = kn_proper(60, 0)
    D = decompose_F_factors(G, matching(2), 0.3, seed=0)
    t = D.metrics["t"]
    assert t == 59
    assert len(D.factors) >= 0.7 * t
    assert len(D.factors) == 59
    assert min(len(f.vertices) for f in D.factors) >= 42
    assert verify_decomposition(G, D).passed


def test_k100_triangle_factors():
    G = kn_proper(100, 0)
    D = decompose_F_factors(G, complete(3), 0.4, seed=0)
    assert D.metrics["t"] == 50
    assert len(D.factors) == 50
    assert all(len(f.vertices) >= 60 for f in D.factors)
    assert verify_decomposition(G, D).passed


def test_monochromatic_host_has_no_family():
    with pytest.raises(FamilyTooSmall):
        decompose_F_factors(mono_complete(12), complete(3), 0.3)


def test_alpha_out_of_range():
    with pytest.raises(InputError):
        decompose_F_factors(kn_proper(12, 0), complete(3), 1.5)


@given(st.floats(0.2, 1.0), st.floats(0.2, 1.0), st.integers(0, 20))
def test_factor_count_monotone_in_alpha(a, b, seed):
    lo, hi = sorted((a, b))
    G = kn_proper(18, seed)
    n_lo = len(decompose_F_factors(G, complete(3), lo, seed=seed).factors)
    n_hi = len(decompose_F_factors(G, complete(3), hi, seed=seed).factors)
    assert n_lo <= n_hi


# matchings

def test_k50_matchings_cover_most_edges():
    G = kn_proper(50, 0)
    D = decompose_matchings_sparse(G, 0.1, seed=0)
    big = [f for f in D.factors if len(f.edges) >= 0.9 * 25]
    assert sum(len(f.edges) for f in big) / G.num_edges >= 0.8
    assert verify_decomposition(G, D).passed


def test_single_edge_has_no_pair():
    with pytest.raises(FamilyTooSmall):
        decompose_matchings_sparse(build_graph(2, [(0, 1, 0)]), 0.1)


def test_two_disjoint_edges_give_one_matching():
    G = build_graph(4, [(0, 1, 0), (2, 3, 1)])
    D = decompose_matchings_sparse(G, 0.0)
    assert len(D.factors) == 1
    assert sorted(D.factors[0].edges) == [(0, 1), (2, 3)]


# transversals

def test_order_one_array():
    D = decompose_transversals(np.array([[4]]), 0.1)
    assert len(D.factors) == 1
    assert verify_decomposition(np.array([[4]]), D).passed


def test_order_two_cyclic_has_no_full_transversal():
    A = latin_cyclic(2)
    D = decompose_transversals(A, 0.5, seed=0)
    assert all(len(f.edges) < 2 for f in D.factors)
    assert verify_decomposition(A, D).passed


@pytest.mark.parametrize("seed", range(5))
def test_cyclic_order_five(seed):
    A = latin_cyclic(5)
    D = decompose_transversals(A, 0.2, seed=seed)
    assert sum(len(f.edges) >= 4 for f in D.factors) >= 4
    assert verify_decomposition(A, D).passed


@given(symbol_arrays(min_n=1, max_n=6), st.floats(0.0, 0.6), st.integers(0, 100))
def test_transversals_never_repeat_row_column_or_symbol(A, delta, seed):
    n = A.shape[0]
    D = decompose_transversals(A, delta, seed=seed)
    cells = set()
    for f in D.factors:
        rows = [u for u, _ in f.edges]
        cols = [v - n for _, v in f.edges]
        syms = [int(A[r, c]) for r, c in zip(rows, cols)]
        assert len(set(rows)) == len(rows) and len(set(cols)) == len(cols) and len(set(syms)) == len(syms)
        assert len(f.edges) >= np.ceil((1 - delta) * n - 1e-9)
        assert cells.isdisjoint(zip(rows, cols))
        cells.update(zip(rows, cols))
    assert verify_decomposition(A, D).passed


# cycles

def test_cycles_reject_small_or_odd_parameters():
    with pytest.raises(InputError):
        decompose_near_spanning_cycles(kn_proper(100, 0), 0.3, 12)
    with pytest.raises(InputError):
        decompose_near_spanning_cycles(kn_proper(100, 0), 0.3, 7)


def test_cycles_need_enough_colours():
    with pytest.raises(FamilyTooSmall):
        decompose_near_spanning_cycles(mono_complete(60), 0.3, 6)


@pytest.fixture(scope="module")
def k120_cycles():
    G = kn_proper(120, 0)
    return G, decompose_near_spanning_cycles(G, 0.3, 12, seed=0)


def test_k120_cycles_are_long_and_valid(k120_cycles):
    G, D = k120_cycles
    assert len(D.factors) >= 1
    assert all(len(f.edges) >= 0.7 * G.n for f in D.factors)
    assert verify_decomposition(G, D).passed


def test_experimental_spanning_keeps_output_valid():
    G = kn_proper(120, 1)
    D = decompose_near_spanning_cycles(G, config=CycleConfig(alpha=0.3, experimental_spanning=True), seed=1)
    sp = D.metrics["spanning"]
    assert sp["lengths"] == [len(f.edges) for f in D.factors]
    assert verify_decomposition(G, D).passed


def test_block_partition_sizes():
    blocks = block_partition(100, 3, seed=0)
    b = block_size(3, 1)
    assert b == 9
    assert all(len(x) == b for x in blocks[:-1]) and 0 < len(blocks[-1]) <= b
    assert sorted(np.concatenate(blocks).tolist()) == list(range(100))


# linker

def test_linker_trivial_cases():
    G = kn_proper(40, 0)
    assert link_fragments([], G, range(10), range(10, 20)).links == []
    L = link_fragments([[30, 31]], G, range(10), range(10, 20), seed=3)
    (x, a, b, y), = L.links
    assert (x, y) == (31, 30) and a < 10 <= b < 20
    assert len(set(L.colours)) == 3


def test_linker_fails_when_all_colours_forbidden():
    G = kn_proper(40, 0)
    with pytest.raises(LinkingFailed):
        link_fragments([[30, 31], [32, 33]], G, range(10), range(10, 20), forbidden_colours=range(G.m),
                       restarts=2)


@pytest.mark.parametrize("seed", range(10))
def test_linker_closes_twenty_fragments_on_k300(seed):
    G = kn_proper(300, 0)
    perm = np.random.default_rng(seed).permutation(300)
    V1, V2, rest = perm[:30], perm[30:60], perm[60:]
    frags = [[int(rest[2 * j]), int(rest[2 * j + 1])] for j in range(20)]
    used = {G.colour(a, b) for a, b in frags}
    L = link_fragments(frags, G, V1, V2, used_colours=used, seed=seed)
    mids = [v for _, a, b, _ in L.links for v in (a, b)]
    assert len(set(mids)) == len(mids)
    assert len(set(L.colours)) == len(L.colours) and used.isdisjoint(L.colours)
    assert all(G.colour(u, v) == c for (u, v), c in zip(L.edges(), L.colours))


# verification

@pytest.fixture(scope="module")
def small_factor_run():
    G = kn_proper(24, 0)
    return G, decompose_F_factors(G, complete(3), 0.3, seed=0)


def tampered(D, fn):
    E = Decomposition.from_dict(D.to_dict())
    fn(E)
    return E


def test_verify_reports_witnesses(small_factor_run):
    G, D = small_factor_run
    assert verify_decomposition(G, D).passed
    f0 = D.factors[0]
    u, v = f0.edges[0]

    def dup(E):
        E.factors.append(Factor([f0.edges[0]], [f0.colours[0]], []))

    rep = verify_decomposition(G, tampered(D, dup))
    assert not rep.checks["edge_disjoint"]["passed"]
    assert rep.checks["edge_disjoint"]["witness"]["edge"] == [u, v]

    def recolour(E):
        E.factors[0].colours[0] = (E.factors[0].colours[0] + 1) % G.m

    rep = verify_decomposition(G, tampered(D, recolour))
    assert not rep.checks["colours_match"]["passed"]

    def repeat_colour(E):
        E.factors[0].colours[1] = E.factors[0].colours[0]

    assert not verify_decomposition(G, tampered(D, repeat_colour)).checks["rainbow"]["passed"]

    def outside(E):
        E.factors[0].edges[0] = (0, G.n + 5)

    assert not verify_decomposition(G, tampered(D, outside)).checks["edges_in_host"]["passed"]

    def unknown(E):
        E.kind = "mystery"

    assert not verify_decomposition(G, tampered(D, unknown)).checks["well_formed"]["passed"]

    def overlap(E):
        E.factors[0].copies[1] = E.factors[0].copies[0]

    assert not verify_decomposition(G, tampered(D, overlap)).checks["internal_structure"]["passed"]


def test_verify_rejects_broken_cycle(k120_cycles):
    G, D = k120_cycles

    def cut(E):
        E.factors[0].edges.pop()
        E.factors[0].colours.pop()

    assert not verify_decomposition(G, tampered(D, cut)).checks["internal_structure"]["passed"]


def test_json_round_trip(small_factor_run):
    _, D = small_factor_run
    text = D.to_json()
    assert Decomposition.from_json(text).to_json() == text
    assert "seconds" not in text


@given(dense_proper_graphs(min_n=8, max_n=16), st.integers(0, 1000))
def test_outputs_always_verify(G, seed):
    for run in (lambda: decompose_F_factors(G, matching(2), 0.5, seed=seed),
                lambda: decompose_matchings_sparse(G, 0.3, seed=seed)):
        try:
            D = run()
        except FamilyTooSmall:
            continue
        assert verify_decomposition(G, D).passed


@given(dense_proper_graphs(min_n=8, max_n=14), st.integers(0, 1000))
def test_same_seed_same_output(G, seed):
    try:
        a = decompose_matchings_sparse(G, 0.3, seed=seed).to_json()
    except FamilyTooSmall:
        assume(False)
    assert decompose_matchings_sparse(G, 0.3, seed=seed).to_json() == a
