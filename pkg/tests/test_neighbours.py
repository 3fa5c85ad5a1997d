"""Nearest/farthest-neighbour digraphs, bi-rooted forests, plane feasibility."""

import math
from fractions import Fraction

import numpy as np
import pytest

from ordviz import (
    Digraph,
    InvalidInputError,
    config_metric_space,
    decompose_bi_rooted,
    edge_order,
    fejes_toth_delta,
    forest_from_children,
    max_proper_children,
    neighbour_digraph,
    neighbour_maps,
    neighbour_maps_from_order,
    nn_embed_plane,
    nn_statistics,
    non_nn_fraction,
    order_from_rank,
    plane_nn_feasible,
    proper_children,
    random_order_nn,
    sample_config,
)


def test_digraph_basics():
    g = Digraph(out=(1, 0, 0, 1))
    assert g.n == 4
    assert g.edges() == [(0, 1), (1, 0), (2, 0), (3, 1)]
    assert g.in_neighbours(0) == [1, 2]
    assert proper_children(g, 0) == [2]      # 1 is the returned edge
    assert proper_children(g, 1) == [3]
    assert max_proper_children(g) == 1


def test_neighbour_digraph_sources_agree():
    for trial in range(15):
        cfg = sample_config(6, seed=900 + trial)
        space = config_metric_space(cfg)
        order = edge_order(cfg)
        for which in ("nearest", "farthest"):
            a = neighbour_digraph(space, which=which)
            b = neighbour_digraph(neighbour_maps(space), which=which)
            c = neighbour_digraph(order, which=which)
            assert a == b == c
    with pytest.raises(InvalidInputError):
        neighbour_digraph(space, which="median")


def test_decompose_random_planar_spaces():
    for trial in range(60):
        cfg = sample_config(4 + trial % 9, seed=1500 + trial)
        g = neighbour_digraph(config_metric_space(cfg))
        dec = decompose_bi_rooted(g)
        assert dec.valid
        members = sorted(v for comp in dec.components for v in comp.members)
        assert members == list(range(g.n))  # exact partition
        for comp in dec.components:
            r0, r1 = comp.roots
            assert g.out[r0] == r1 and g.out[r1] == r0
            for v, p in comp.parent:
                assert g.out[v] == p
                assert v not in comp.roots
            # every non-root member has a recorded parent
            assert sorted(v for v, _ in comp.parent) == sorted(
                set(comp.members) - set(comp.roots))
        assert dec.n == g.n


def test_decompose_rejects_long_cycles():
    dec = decompose_bi_rooted(Digraph(out=(1, 2, 0)))
    assert not dec.valid
    assert dec.reason
    # self-loop is not a mutual pair either
    assert not decompose_bi_rooted(Digraph(out=(0, 0, 1))).valid


def test_forest_from_children():
    g = forest_from_children([4, 3])
    assert g.n == 9
    assert g.edges() == [(0, 1), (1, 0), (2, 0), (3, 0), (4, 0), (5, 0),
                         (6, 1), (7, 1), (8, 1)]
    assert len(proper_children(g, 0)) == 4
    assert len(proper_children(g, 1)) == 3
    assert max_proper_children(g) == 4
    with pytest.raises(InvalidInputError):
        forest_from_children([2, 2, 2])


def test_plane_feasibility_verdicts():
    assert plane_nn_feasible(forest_from_children([4, 3])).verdict == "feasible"
    five = plane_nn_feasible(forest_from_children([5, 0]))
    assert five.verdict == "infeasible"
    assert five.max_proper_children == 5
    assert plane_nn_feasible(Digraph(out=(1, 2, 0))).verdict == "infeasible"
    big = plane_nn_feasible(Digraph(out=tuple([1, 0] + [0] * 4 + [1] * 4)))
    assert big.verdict == "out-of-scope"


def test_embedding_preserves_nn_digraph():
    for trial in range(40):
        cfg = sample_config(4 + trial % 6, seed=2100 + trial)
        g = neighbour_digraph(config_metric_space(cfg))
        dec = decompose_bi_rooted(g)
        emb = nn_embed_plane(dec)
        d = emb.distance_matrix()
        np.fill_diagonal(d, np.inf)
        assert tuple(int(v) for v in d.argmin(axis=1)) == g.out


def test_four_plus_three_construction():
    dec = decompose_bi_rooted(forest_from_children([4, 3]))
    emb = nn_embed_plane(dec)
    assert emb.n == 9
    assert non_nn_fraction(emb) == Fraction(7, 9)


def test_non_nn_fraction_simple():
    # two points: both are each other's nearest neighbour
    cfg = sample_config(2, seed=0)
    assert non_nn_fraction(cfg) == 0
    # collinear 0,1,3: nn map is (1,0,1); point 2 unclaimed
    space = config_metric_space(sample_config(3, seed=5))
    maps = neighbour_maps(space)
    assert non_nn_fraction(space) == non_nn_fraction(maps)


def test_sphere_packing_bound():
    assert abs(fejes_toth_delta(6) - math.sqrt(2)) < 1e-12
    vals = [fejes_toth_delta(n) for n in range(3, 30)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert fejes_toth_delta(13) > 1 > fejes_toth_delta(14)
    with pytest.raises(InvalidInputError):
        fejes_toth_delta(2)


def test_random_order_nn_matches_brute_force():
    # exact distribution oracle: enumerate all orders on 4 points
    n, total = 4, math.factorial(6)
    mutual_sum = 0
    for rank in range(total):
        nn = np.array(neighbour_maps_from_order(order_from_rank(n, rank)).nn)
        mutual_sum += int((nn[nn] == np.arange(n)).sum())
    exact_mutual_mean = mutual_sum / total / n

    rng = np.random.default_rng(12)
    samples = np.array([random_order_nn(n, rng) for _ in range(4000)])
    has_mutual = 0
    mutual_mean = 0.0
    for nn in samples:
        m = nn[nn] == np.arange(n)
        has_mutual += m.any()
        mutual_mean += m.mean()
    assert has_mutual == len(samples)  # the top pair is always mutual
    assert abs(mutual_mean / len(samples) - exact_mutual_mean) < 0.03


def test_nn_statistics_fields_and_small_case():
    st = nn_statistics(4, trials=300, seed=3)
    assert st.n == 4 and st.trials == 300
    assert 0 <= st.biroot_prob <= 1
    assert 0 <= st.components_per_point <= 0.5
    assert st.plane_feasible_rate == 1.0   # 4 points cannot exceed 4 children
    # mutual pairs come two at a time
    assert abs(st.components_per_point - st.biroot_prob / 2) < 1e-12
    with pytest.raises(InvalidInputError):
        nn_statistics(1, trials=10)
