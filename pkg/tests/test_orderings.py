import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diagpack.core import Permutation, apply_permutations, num_diagonals
from diagpack.orderings import (
    angular_order,
    bfs_levels,
    components,
    eccentricity,
    eigen_order,
    graph_ordering,
    initial_permutations,
    lbs_order,
    mp_order,
    pseudo_peripheral_node,
    rcm_order,
    spectral_coordinates,
    _cm_component,
)
from diagpack.synth import SynthSpec, circulant, generate
from helpers import (
    cycle_graph,
    graph,
    grid_graph,
    is_bijection,
    min_width_brute,
    path_graph,
    random_pattern,
    star_graph,
    width,
)


@st.composite
def small_graphs(draw, max_m=10):
    m = draw(st.integers(1, max_m))
    edges = draw(st.lists(st.tuples(st.integers(0, m - 1), st.integers(0, m - 1)), max_size=3 * m))
    return graph(m, edges or [(0, 0)])


def _connected(G) -> bool:
    return len(components(G)) == 1


# -- BFS and pseudo-peripheral nodes -------------------------------------------


@given(small_graphs())
@settings(max_examples=60, deadline=None)
def test_levels_partition_component_and_edges_span_adjacent_levels(G):
    lv = bfs_levels(G, 0)
    level_of = {v: i for i, L in enumerate(lv.levels) for v in L}
    comp = next(c for c in components(G) if 0 in c)
    assert sorted(level_of) == comp
    for u in level_of:
        for w in G.adj[u]:
            assert abs(level_of[u] - level_of[w]) <= 1


def test_ppn_path_returns_endpoint():
    G = path_graph(5)
    for start in range(5):
        assert pseudo_peripheral_node(G, start) in (0, 4)


def test_ppn_cycle_any_vertex():
    G = cycle_graph(6)
    v = pseudo_peripheral_node(G, 2)
    assert eccentricity(G, v) == 3


def test_ppn_grid_reaches_maximum_eccentricity():
    G = grid_graph(4, 6)
    best = max(eccentricity(G, v) for v in range(G.m))
    for start in (0, 9, 14, 23):
        assert eccentricity(G, pseudo_peripheral_node(G, start)) == best


def test_ppn_single_vertex_and_seeded_mode():
    assert pseudo_peripheral_node(graph(1, [(0, 0)]), 0) == 0
    G = grid_graph(3, 5)
    a = pseudo_peripheral_node(G, None, rng=random.Random(4))
    b = pseudo_peripheral_node(G, None, rng=random.Random(4))
    assert a == b


def test_ppn_rejects_bad_patience():
    with pytest.raises(ValueError):
        pseudo_peripheral_node(path_graph(3), 0, patience=0)


# -- RCM -----------------------------------------------------------------------


def test_rcm_star_leaves_before_center():
    order = rcm_order(star_graph(4), 0)
    assert order[-1] == 0
    assert sorted(order[:-1]) == [1, 2, 3, 4]


def test_rcm_path_from_endpoint_is_reversed():
    assert rcm_order(path_graph(4), 0) == [3, 2, 1, 0]


def test_rcm_neighbors_by_degree_then_id():
    # vertex 0 sees 1 (deg 3), 2 (deg 1), 3 (deg 2)
    G = graph(6, [(0, 1), (0, 2), (0, 3), (1, 4), (1, 5), (3, 4)])
    assert _cm_component(G, 0)[::-1][:4] == [0, 2, 3, 1]


def test_rcm_recovers_tridiagonal_band():
    rng = np.random.default_rng(0)
    labels = rng.permutation(8)
    G = graph(8, [(labels[i], labels[i + 1]) for i in range(7)])
    order = graph_ordering(G, "rcm")
    assert width(G, order) == 1 == min_width_brute(G)


@given(small_graphs(8))
@settings(max_examples=40, deadline=None)
def test_rcm_width_not_worse_than_cuthill_mckee(G):
    if not _connected(G):
        return
    root = pseudo_peripheral_node(G, 0)
    rcm = rcm_order(G, root)
    cm = rcm[::-1]
    assert width(G, rcm) <= width(G, cm)
    assert width(G, rcm) >= min_width_brute(G) if G.m <= 7 else True


# -- parity-block orderings -------------------------------------------------------


def test_mp_path():
    assert mp_order(path_graph(5), 0) == [0, 2, 4, 1, 3]


def test_mp_small_grid():
    assert mp_order(grid_graph(2, 2), 0) == [0, 3, 1, 2]


def _parity_blocks(G, root):
    lv = bfs_levels(G, root).levels
    even = {v for L in lv[0::2] for v in L}
    return even, set(range(G.m)) - even


@pytest.mark.parametrize("shape", [(3, 4), (4, 6), (5, 5), (2, 7)])
def test_mp_grid_blocks_have_no_internal_edges(shape):
    G = grid_graph(*shape)
    order = mp_order(G, 0)
    even, odd = _parity_blocks(G, 0)
    k = len(even)
    assert set(order[:k]) == even and set(order[k:]) == odd
    for u, v in G.edges():
        assert (u in even) != (v in even)
    pos = {v: p for p, v in enumerate(order)}
    assert min(abs(pos[u] - pos[v]) for u, v in G.edges()) >= 1


@pytest.mark.parametrize("shape", [(3, 4), (4, 6), (5, 5)])
def test_lbs_grid_uses_the_same_parity_blocks(shape):
    G = grid_graph(*shape)
    lv = bfs_levels(G, 0).levels
    order = lbs_order(G, 0)
    odd = [v for L in lv[1::2] for v in L]
    even_rest = [v for L in lv[2::2] for v in L]
    assert order == [0] + odd + even_rest
    for block in (set(odd), set(even_rest) | {0}):
        assert not any(u in block and v in block for u, v in G.edges())


@pytest.mark.xfail(strict=True, reason="the sweep labels the root first and then odd levels, so the block order differs")
def test_lbs_equals_mp_on_grid_literally():
    G = grid_graph(3, 4)
    assert lbs_order(G, 0) == mp_order(G, 0)


def test_lbs_single_vertex():
    assert lbs_order(graph(1, [(0, 0)]), 0) == [0]


def test_lbs_path6_matches_hand_simulation():
    # sweep 1 labels 1, 3, 5 (2 and 4 flagged), sweep 2 labels 2, 4
    assert lbs_order(path_graph(6), 0) == [0, 1, 3, 5, 2, 4]


@given(small_graphs(), st.sampled_from(["rcm", "mp", "lbs"]))
@settings(max_examples=80, deadline=None)
def test_every_ordering_is_a_bijection(G, method):
    assert is_bijection(graph_ordering(G, method), G.m)
    assert is_bijection(graph_ordering(G, method, seed=3), G.m)


def test_components_largest_first():
    G = graph(7, [(5, 6), (0, 1), (1, 2), (3, 3)])
    assert components(G) == [[0, 1, 2], [5, 6], [3], [4]]
    order = graph_ordering(G, "rcm")
    assert set(order[:3]) == {0, 1, 2} and set(order[3:5]) == {5, 6}


# -- permutations from orderings -----------------------------------------------------


def test_pattern_mode_uses_one_permutation_for_both_sides():
    A = random_pattern(np.random.default_rng(1), 12, 0.2)
    pr, pc = initial_permutations(A, "rcm", "pattern")
    assert pr == pc


def test_bipartite_mode_gives_valid_pair():
    A = random_pattern(np.random.default_rng(2), 12, 0.2)
    for o in ("rcm", "mp", "lbs"):
        pr, pc = initial_permutations(A, o, "bipartite")
        assert pr.n == pc.n == 12


def test_natural_is_identity():
    A = random_pattern(np.random.default_rng(3), 5, 0.5)
    assert initial_permutations(A, "natural") == (Permutation.identity(5), Permutation.identity(5))


def test_unknown_ordering():
    with pytest.raises(ValueError):
        initial_permutations(random_pattern(np.random.default_rng(3), 5, 0.5), "gps")


# -- spectral ordering --------------------------------------------------------------


def test_angular_ties_broken_by_vertex_id():
    x = np.array([1.0, 1.0, -1.0, 1.0])
    y = np.array([0.0, 0.0, 0.0, 1.0])
    assert angular_order(x, y).tolist() == [0, 1, 3, 2]


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
@pytest.mark.parametrize("mode,nev", [("pattern", 3), ("bipartite", 5)])
def test_eigen_recovers_scrambled_ring(seed, mode, nev):
    rng = np.random.default_rng(seed)
    P = Permutation.random(50, rng)
    A = apply_permutations(circulant(50, [0, 1, 49]), P, P)
    pr, pc, count = eigen_order(A, mode, nev=nev)
    assert count == num_diagonals(A, pr, pc) == 3


@pytest.mark.parametrize("residues", [[1, 49], [0, 1, 49]])
def test_eigen_two_vectors_within_twice_the_hidden_count(residues):
    rng = np.random.default_rng(1)
    P = Permutation.random(50, rng)
    A = apply_permutations(circulant(50, residues), P, P)
    assert eigen_order(A, "pattern", nev=2)[2] <= 2 * len(residues)


@pytest.mark.parametrize("mode", ["pattern", "bipartite"])
def test_eigen_count_is_consistent_on_synthetic_instances(mode):
    A, P, true = generate(SynthSpec(80, 4, 0.0, 5))
    pr, pc, count = eigen_order(A, mode, nev=6)
    assert count == num_diagonals(A, pr, pc)
    assert true <= count < num_diagonals(A)


def test_eigen_argument_checks():
    A = circulant(5, [0, 1])
    with pytest.raises(ValueError):
        eigen_order(A, "pattern", nev=1)
    with pytest.raises(ValueError):
        eigen_order(A, "pattern", nev=6)


def test_spectral_coordinates_trace_a_circle_for_a_cycle():
    A = circulant(40, [1, 39])
    xy = spectral_coordinates(A, "pattern", (1, 2))
    r = np.hypot(xy[:, 0], xy[:, 1])
    assert np.allclose(r, r.mean(), rtol=1e-6)
