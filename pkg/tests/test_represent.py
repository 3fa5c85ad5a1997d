"""Representation-kind checks and their implication chain."""

import numpy as np

from ordviz import (PointConfig, RepresentationKind, TiedDistancesError,
                    check_representation, config_metric_space, edge_order,
                    sample_config)

K = RepresentationKind


def _space_and_copy(seed: int, n: int = 6):
    cfg = sample_config(n, seed=seed)
    space = config_metric_space(cfg)
    return space, cfg


def test_isometric_copy_true_for_every_kind():
    space, cfg = _space_and_copy(seed=5)
    for kind in K:
        assert check_representation(space, cfg, kind)


def test_rotated_scaled_copy_true_for_every_kind():
    space, cfg = _space_and_copy(seed=6)
    th = 0.83
    rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    moved = PointConfig(coords=(cfg.coords @ rot.T) * 2.5 + 1.0)
    for kind in K:
        assert check_representation(space, moved, kind)


def test_order_iff_equal_edge_orders():
    rng = np.random.default_rng(12)
    hits = 0
    for trial in range(30):
        space, _ = _space_and_copy(seed=100 + trial, n=5)
        other = sample_config(5, seed=500 + trial)
        is_order = check_representation(space, other, K.ORDER)
        same = edge_order(space) == edge_order(config_metric_space(other))
        assert is_order == same
        hits += is_order
    assert hits < 30  # unrelated configs almost never preserve the order


def test_implication_chain_on_random_pairs():
    # Order => LocalOrder => FirstAndSecondNearest => TwoNearestSet,
    # and Order => ExtremalNeighbours; no counterexample permitted
    chain = [K.ORDER, K.LOCAL_ORDER, K.FIRST_AND_SECOND_NEAREST,
             K.TWO_NEAREST_SET]
    rng = np.random.default_rng(3)
    for trial in range(120):
        n = int(rng.integers(4, 8))
        space, _ = _space_and_copy(seed=2000 + trial, n=n)
        # nearby perturbations of the original points give a mix of kinds
        base = sample_config(n, seed=2000 + trial)
        noise = rng.normal(scale=rng.choice([1e-4, 0.03, 0.3]),
                           size=base.coords.shape)
        cand = PointConfig(coords=base.coords + noise)
        results = [check_representation(space, cand, k) for k in chain]
        for strong, weak in zip(results, results[1:]):
            assert not (strong and not weak)
        if results[0]:
            assert check_representation(space, cand, K.EXTREMAL_NEIGHBOURS)


def test_perturbed_swap_breaks_order_but_can_keep_local_order():
    # move one point until exactly the two closest global ranks swap
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [5.0, 0.0], [2.0, 7.0],
                    [9.2, 3.1], [4.1, 3.9]])
    space = config_metric_space(PointConfig(coords=pts))
    found_break = False
    for eps in np.linspace(0.0, 0.8, 60):
        cand = pts.copy()
        cand[1, 0] += eps
        cfg = PointConfig(coords=cand)
        try:
            ok = check_representation(space, cfg, K.ORDER)
        except TiedDistancesError:
            continue  # the crossing point itself: strictness required
        if not ok:
            found_break = True
            break
    assert found_break
