"""Sampling experiments, order ranking, coverage bookkeeping, confidence bound."""

import math
from fractions import Fraction

import numpy as np
import pytest

from ordviz import (
    ConfidenceQuery,
    CoverageStore,
    EdgeOrder,
    InvalidInputError,
    RepresentationKind,
    SampleDomain,
    UnitSquare,
    confidence_lower_bound,
    coverage_experiment,
    normal_cdf,
    normal_quantile,
    order_from_rank,
    order_rank,
    pair_count,
    random_edge_order,
    sample_config,
    structure_codes,
    unit_cube,
)

K = RepresentationKind


def test_order_rank_bijection_small():
    m = pair_count(3)
    seen = set()
    for r in range(math.factorial(m)):
        order = order_from_rank(3, r)
        assert order_rank(order) == r
        seen.add(order.ranks)
    assert len(seen) == math.factorial(m)
    assert order_from_rank(3, 0).ranks == (0, 1, 2)
    assert order_from_rank(3, math.factorial(m) - 1).ranks == (2, 1, 0)


def test_order_rank_roundtrip_random():
    rng = np.random.default_rng(3)
    for n in (4, 5, 6):
        for _ in range(30):
            order = random_edge_order(n, rng)
            assert order_from_rank(n, order_rank(order)) == order
    with pytest.raises(InvalidInputError):
        order_from_rank(4, math.factorial(6))
    with pytest.raises(InvalidInputError):
        order_from_rank(4, -1)


def test_coverage_store():
    store = CoverageStore.empty(4)
    assert store.count == 0
    assert store.add(17) is True
    assert store.add(17) is False
    assert store.count == 1
    assert 17 in store and 18 not in store
    store.add(5)
    assert store.ranks().tolist() == [5, 17]

    other = CoverageStore.empty(4)
    other.add(17)
    other.add(700)
    store.merge(other)
    assert store.ranks().tolist() == [5, 17, 700]
    with pytest.raises(InvalidInputError):
        store.merge(CoverageStore.empty(5))
    with pytest.raises(InvalidInputError):
        CoverageStore.empty(6)


def test_coverage_determinism_and_extension():
    short = coverage_experiment(4, "euclidean", K.ORDER, trials=30, seed=9)
    again = coverage_experiment(4, "euclidean", K.ORDER, trials=30, seed=9)
    longer = coverage_experiment(4, "euclidean", K.ORDER, trials=90, seed=9)
    assert short.store.ranks().tolist() == again.store.ranks().tolist()
    assert set(short.store.ranks()) <= set(longer.store.ranks())
    assert short.orders_covered == short.distinct_orders_found == short.store.count
    assert short.fraction_of_factorial == Fraction(short.orders_covered, math.factorial(6))
    assert longer.orders_covered >= short.orders_covered
    orders = list(short.realized_orders())
    assert len(orders) == short.distinct_orders_found
    assert all(isinstance(o, EdgeOrder) for o in orders)


def test_coverage_kind_chain():
    # coarser structure kinds cover at least as many orders from the same samples
    frac = {k: coverage_experiment(4, "euclidean", k, trials=40, seed=2).fraction_of_factorial
            for k in K}
    assert frac[K.ORDER] <= frac[K.LOCAL_ORDER]
    assert frac[K.LOCAL_ORDER] <= frac[K.EXTREMAL_NEIGHBOURS]
    assert frac[K.EXTREMAL_NEIGHBOURS] <= frac[K.NEAREST]
    assert frac[K.EXTREMAL_NEIGHBOURS] <= frac[K.FARTHEST]
    assert frac[K.LOCAL_ORDER] <= frac[K.FIRST_AND_SECOND_NEAREST] <= frac[K.TWO_NEAREST_SET]
    assert all(0 < f <= 1 for f in frac.values())


def _brute_structure(order: EdgeOrder, kind: RepresentationKind):
    """Reference structure extraction straight from the rank tuple."""
    n = order.n
    out = []
    for v in range(n):
        partners = [u for u in range(n) if u != v]
        partners.sort(key=lambda u: order.rank_of(v, u))
        if kind is K.LOCAL_ORDER:
            out.append(tuple(partners))
        elif kind is K.NEAREST:
            out.append(partners[0])
        elif kind is K.FARTHEST:
            out.append(partners[-1])
        elif kind is K.EXTREMAL_NEIGHBOURS:
            out.append((partners[0], partners[-1]))
        elif kind is K.FIRST_AND_SECOND_NEAREST:
            out.append((partners[0], partners[1]))
        elif kind is K.TWO_NEAREST_SET:
            out.append(frozenset(partners[:2]))
    return tuple(out)


def test_structure_codes_match_brute_force():
    n = 4
    total = math.factorial(pair_count(n))
    rows = np.array([order_from_rank(n, r).ranks for r in range(total)], dtype=np.int8)
    orders = [order_from_rank(n, r) for r in range(total)]
    for kind in (K.LOCAL_ORDER, K.NEAREST, K.FARTHEST, K.EXTREMAL_NEIGHBOURS,
                 K.FIRST_AND_SECOND_NEAREST, K.TWO_NEAREST_SET):
        codes = structure_codes(rows, n, kind)
        brute = [_brute_structure(o, kind) for o in orders]
        # same partition of the order space
        assert len(set(codes.tolist())) == len(set(brute))
        by_code = {}
        for c, b in zip(codes.tolist(), brute):
            assert by_code.setdefault(c, b) == b
    with pytest.raises(InvalidInputError):
        structure_codes(rows, n, K.ORDER)


def test_normal_quantile_and_cdf():
    assert abs(normal_quantile(0.995) - 2.575829303548901) < 1e-12
    assert normal_quantile(0.5) == 0.0
    for beta in (0.6, 0.9, 0.995, 0.9999):
        assert abs(normal_cdf(normal_quantile(beta)) - beta) < 1e-12
    with pytest.raises(InvalidInputError):
        normal_quantile(0.0)
    with pytest.raises(InvalidInputError):
        normal_quantile(1.0)


def test_confidence_bound_calibration():
    # the two reference calibration points, evaluated with the raw counts
    lo = confidence_lower_bound(ConfidenceQuery(s=795, N=10_000, beta=0.995))
    assert 0.9270 <= 1.0 - lo <= 0.9275
    hi = confidence_lower_bound(ConfidenceQuery(s=4156, N=10_000, beta=0.995))
    assert 0.596 <= 1.0 - hi <= 0.600


def test_confidence_bound_properties():
    bounds = [confidence_lower_bound(ConfidenceQuery(s=s, N=1000, beta=0.99))
              for s in (10, 100, 500, 900, 990)]
    assert all(a < b for a, b in zip(bounds, bounds[1:]))
    for s in (10, 500, 990):
        b = confidence_lower_bound(ConfidenceQuery(s=s, N=1000, beta=0.99))
        assert 0 <= b < s / 1000
    with pytest.raises(InvalidInputError):
        ConfidenceQuery(s=-1, N=100, beta=0.99)
    with pytest.raises(InvalidInputError):
        ConfidenceQuery(s=5, N=0, beta=0.99)
    with pytest.raises(InvalidInputError):
        ConfidenceQuery(s=5, N=100, beta=0.4)


def test_sample_config_contract():
    a = sample_config(6, seed=4)
    b = sample_config(6, seed=4)
    assert np.array_equal(a.coords, b.coords)
    assert a.coords.min() >= 0 and a.coords.max() <= 1
    vals = a.pair_distances()
    assert np.unique(vals).size == vals.size
    assert sample_config(5, seed=1, metric="manhattan").metric == "l1"
    assert sample_config(5, domain=SampleDomain(dim=4), seed=1).m == 4
    assert unit_cube(2) == UnitSquare
    with pytest.raises(InvalidInputError):
        sample_config(1)
    with pytest.raises(InvalidInputError):
        sample_config(5, metric="chebyshev")
    with pytest.raises(InvalidInputError):
        SampleDomain(dim=0)
