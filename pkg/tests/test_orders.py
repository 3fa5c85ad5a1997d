"""Edge orders, accuracy, and the Kendall identity against brute force."""

from fractions import Fraction

import numpy as np
import pytest

from ordviz import (EdgeOrder, InvalidInputError, PointConfig, all_pairs,
                    config_metric_space, edge_order, kendall_tau,
                    neighbour_maps, neighbour_maps_from_order,
                    order_accuracy, order_accuracy_against_config,
                    pair_count, random_edge_order)


def brute_concordance(a: EdgeOrder, b: EdgeOrder) -> Fraction:
    """O(M^2) oracle: fraction of pair-of-pairs compared the same way."""
    m = pair_count(a.n)
    agree = 0
    total = 0
    for k in range(m):
        for l in range(k + 1, m):
            total += 1
            if (a.ranks[k] < a.ranks[l]) == (b.ranks[k] < b.ranks[l]):
                agree += 1
    return Fraction(agree, total)


def test_edge_order_three_collinear_points():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [3.0, 0.0]])
    order = edge_order(config_metric_space(PointConfig(coords=pts)))
    # pairs in lex order: {0,1}, {0,2}, {1,2} with distances 1, 3, 2
    assert order.ranks == (0, 2, 1)


def test_hand_example_ranks():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [5.0, 0.0], [2.0, 7.0]])
    order = edge_order(config_metric_space(PointConfig(coords=pts)))
    assert order.ranks == (0, 2, 4, 1, 3, 5)


def test_order_accuracy_identity_and_reversal():
    rng = np.random.default_rng(0)
    for n in (4, 5, 6):
        a = random_edge_order(n, rng)
        rev = EdgeOrder(n, tuple(pair_count(n) - 1 - r for r in a.ranks))
        assert order_accuracy(a, a) == 1
        assert kendall_tau(a, a) == 1
        assert order_accuracy(a, rev) == 0
        assert kendall_tau(a, rev) == -1


def test_adjacent_transposition_accuracy():
    # n=4: swapping two adjacent ranks flips exactly one of the 15
    # pair-of-pairs comparisons
    base = EdgeOrder(4, (0, 1, 2, 3, 4, 5))
    swapped = EdgeOrder(4, (1, 0, 2, 3, 4, 5))
    assert order_accuracy(base, swapped) == Fraction(14, 15)
    assert kendall_tau(base, swapped) == Fraction(13, 15)


def test_accuracy_matches_brute_force():
    rng = np.random.default_rng(42)
    for trial in range(60):
        n = int(rng.integers(4, 8))
        a = random_edge_order(n, rng)
        b = random_edge_order(n, rng)
        acc = order_accuracy(a, b)
        assert acc == brute_concordance(a, b)
        assert order_accuracy(b, a) == acc  # symmetry
        assert kendall_tau(a, b) == 2 * acc - 1


def test_order_accuracy_rejects_mismatched_sizes():
    a = random_edge_order(4, np.random.default_rng(1))
    b = random_edge_order(5, np.random.default_rng(1))
    with pytest.raises(InvalidInputError):
        order_accuracy(a, b)


def test_ties_in_image_count_as_discordant():
    # a square: image distances carry ties; comparisons against a tied
    # image pair can never agree
    ref_pts = np.array([[0.0, 0.0], [1.0, 0.1], [5.0, 0.0], [2.0, 7.0]])
    ref = edge_order(config_metric_space(PointConfig(coords=ref_pts)))
    square = PointConfig(coords=np.array(
        [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))
    acc = order_accuracy_against_config(ref, square)
    # the square has 4 tied sides and 2 tied diagonals: only the
    # side-versus-diagonal comparisons (4*2 = 8 of 15) can score
    assert acc <= Fraction(8, 15)


def test_random_edge_order_is_uniform_permutation():
    rng = np.random.default_rng(9)
    seen = set()
    for _ in range(200):
        o = random_edge_order(4, rng)
        assert sorted(o.ranks) == list(range(6))
        seen.add(o.ranks)
    assert len(seen) > 150  # 720 possibilities; collisions are rare


def test_neighbour_maps_from_order_matches_metric():
    rng = np.random.default_rng(23)
    for trial in range(40):
        n = int(rng.integers(3, 9))
        d = rng.random((n, n))
        d = (d + d.T) / 2
        np.fill_diagonal(d, 0.0)
        from ordviz import build_metric_space
        space = build_metric_space(d, tie_policy="perturb")
        via_metric = neighbour_maps(space)
        via_order = neighbour_maps_from_order(edge_order(space))
        assert tuple(via_metric.nn) == tuple(via_order.nn)
        assert tuple(via_metric.fn) == tuple(via_order.fn)


def test_edge_order_requires_distinct_distances():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]])
    from ordviz import TiedDistancesError
    with pytest.raises(TiedDistancesError):
        edge_order(config_metric_space(PointConfig(coords=pts)))
