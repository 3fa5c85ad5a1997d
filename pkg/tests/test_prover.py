"""Refutation engine: seeding, propagation soundness, search, transcripts."""

import math

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from ordviz import (
    ConstraintMode,
    EdgeOrder,
    InvalidInputError,
    check_proof,
    edge_order,
    init_state,
    neighbour_maps_from_order,
    parse_proof,
    prove,
    random_edge_order,
    sample_config,
)

# ten-pair closeness sequence known to be undrawable already from its
# extremal neighbour maps: de < ad < ac < ab < ce < be < bc < cd < ae < bd
FIG_PAIRS = [(3, 4), (0, 3), (0, 2), (0, 1), (2, 4),
             (1, 4), (1, 2), (2, 3), (0, 4), (1, 3)]
FIG_ORDER = EdgeOrder.from_pairs(5, FIG_PAIRS)


# -- true-plane oracle -------------------------------------------------------


def _deg(coords, apex, x, y):
    u = coords[x] - coords[apex]
    v = coords[y] - coords[apex]
    c = float(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v)))
    return math.degrees(math.acos(max(-1.0, min(1.0, c))))


def _assert_state_sound(st, coords, tol=1e-6):
    """Every derived bound and fact must hold for this real drawing."""
    for a in range(st.tables.num_angles):
        z, x, y = (int(v) for v in st.tables.angle_points[a])
        iv = st.angle_interval(z, x, y)
        true = _deg(coords, z, x, y)
        assert float(iv.lower) - tol <= true <= float(iv.upper) + tol, \
            f"angle at {z} between {x},{y}: {true} outside {iv}"
    for fact in st.facts():
        if fact.kind == "angular-between":
            apex, mid, o1, o2 = fact.points
            gap = _deg(coords, apex, o1, o2) - _deg(coords, apex, o1, mid) \
                - _deg(coords, apex, mid, o2)
            if fact.truth:
                assert abs(gap) < tol, f"between {fact.points}: gap {gap}"
            else:
                assert abs(gap) > tol, f"not-between {fact.points} but gap {gap}"
        elif fact.kind == "in-hull":
            z, p, q, r = fact.points
            s = _deg(coords, z, p, q) + _deg(coords, z, q, r) + _deg(coords, z, p, r)
            if fact.truth:
                assert abs(s - 360.0) < tol
            else:
                assert s < 360.0 - tol
        elif fact.kind == "on-boundary":
            hull = ConvexHull(coords)
            assert fact.points[0] in set(hull.vertices.tolist())


def test_propagation_sound_on_real_drawings():
    for trial in range(60):
        n = 4 + trial % 4
        cfg = sample_config(n, seed=5000 + trial)
        order = edge_order(cfg)
        for mode in ConstraintMode:
            st = init_state(order, mode)
            status = st.propagate()
            assert status != "contradiction"
            _assert_state_sound(st, cfg.coords)


def test_propagation_learns_something():
    cfg = sample_config(5, seed=11)
    st = init_state(edge_order(cfg), ConstraintMode.FULL_ORDER)
    st.propagate()
    tightened = sum(
        1 for a in range(st.tables.num_angles)
        if st.angle_interval(*map(int, st.tables.angle_points[a])).upper < 180
        or st.angle_interval(*map(int, st.tables.angle_points[a])).lower > 0)
    assert tightened > 0
    assert st.derived_line_count > 0
    assert any(f.kind == "on-boundary" for f in st.facts())


def test_realizable_orders_never_refuted():
    for trial in range(60):
        cfg = sample_config(5, seed=6000 + trial)
        order = edge_order(cfg)
        for mode in ConstraintMode:
            res = prove(order, mode, max_depth=2, lookahead=False)
            assert not res.refuted, f"refuted a drawable order (seed {5000+trial})"
            assert res.verdict == "unknown"
            assert res.reason


def test_reference_order_refuted_from_extremal_maps():
    res = prove(FIG_ORDER, ConstraintMode.EXTREMAL_ONLY, max_depth=1)
    assert res.refuted
    assert res.verdict == "refuted"
    assert res.reason is None
    # the full comparison set can only know more
    assert prove(FIG_ORDER, ConstraintMode.FULL_ORDER, max_depth=1).refuted
    # boundary premise: exactly the farthest-neighbour image
    maps = neighbour_maps_from_order(FIG_ORDER)
    boundary = next(g for g in res.seed_groups if g.tag == "boundary")
    assert boundary.members == tuple(sorted(set(maps.fn)))


def test_reference_transcript_content_and_replay():
    res = prove(FIG_ORDER, ConstraintMode.EXTREMAL_ONLY, max_depth=1)
    text = res.render()
    assert "de < ad < ac < ab < ce < be < bc < cd < ae < bd" in text
    assert "extremal" in text.splitlines()[1]
    assert "smallest" in text and "on bndry" in text
    assert "CASE ANALYSIS" in text
    assert "CONTRADICTION in all" in text
    # deterministic
    assert prove(FIG_ORDER, ConstraintMode.EXTREMAL_ONLY, max_depth=1).render() == text

    rep = check_proof(text)
    assert rep.ok and rep.refuted
    assert rep.error is None
    assert rep.lines_checked > 20


def test_machine_proofs_replay():
    rng = np.random.default_rng(314)
    orders = [random_edge_order(5, rng) for _ in range(200)]
    results = [prove(o, max_depth=3, lookahead=False) for o in orders]
    refuted = [r for r in results if r.refuted]
    assert len(refuted) >= 10  # drawability is rare among uniform orders
    for r in refuted:
        rep = check_proof(r.render())
        assert rep.ok and rep.refuted, rep.error


def test_parse_roundtrip():
    res = prove(FIG_ORDER, ConstraintMode.EXTREMAL_ONLY, max_depth=1)
    order, extremal, labels, parsed = parse_proof(res.render())
    assert order == FIG_ORDER
    assert extremal is True
    assert labels == ("a", "b", "c", "d", "e")
    assert parsed


def _tamper(text, old, new):
    assert old in text
    return text.replace(old, new, 1)


def test_checker_rejects_tampering():
    res = prove(FIG_ORDER, ConstraintMode.EXTREMAL_ONLY, max_depth=1)
    text = res.render()
    lines = text.splitlines()

    # a printed bound quietly loosened
    target = next(ln for ln in lines if "< 60" in ln and "smallest" in ln)
    bad = _tamper(text, target, target.replace("< 60", "< 61"))
    assert not check_proof(bad).ok

    # a strict comparison weakened
    target = next(ln for ln in lines if "tri sum" in ln)
    bad = _tamper(text, target, target.replace("<", "<=", 1))
    assert not check_proof(bad).ok

    # a case block dropped wholesale
    start = next(k for k, ln in enumerate(lines) if "(ii) ASSUMING" in ln)
    end = next(k for k in range(start + 1, len(lines))
               if "ASSUMING" in lines[k] or lines[k].startswith("CONTRADICTION"))
    bad = "\n".join(lines[:start] + lines[end:])
    assert not check_proof(bad).ok

    # the closing tally lying about how many cases ran
    bad = _tamper(text, "CONTRADICTION in all", "CONTRADICTION in most")
    assert not check_proof(bad).ok

    # a derivation line citing the wrong premise
    target = next(ln for ln in lines if ln.rstrip().endswith(".") and "  2." in ln)
    shifted = target.replace("  2.", "  3.", 1)
    if shifted != target:
        bad = _tamper(text, target, shifted)
        assert not check_proof(bad).ok

    # header order not matching the derivation
    bad = _tamper(text, "de < ad", "ad < de")
    assert not check_proof(bad).ok


def test_prove_argument_validation():
    with pytest.raises(InvalidInputError):
        prove(FIG_ORDER, max_depth=-1)
    with pytest.raises(InvalidInputError):
        prove(FIG_ORDER, max_lines=0)
    with pytest.raises(InvalidInputError):
        prove(FIG_ORDER, mode="sideways")
    with pytest.raises(InvalidInputError):
        init_state(random_edge_order(3, np.random.default_rng(0)))
    assert ConstraintMode.coerce("full") is ConstraintMode.FULL_ORDER
    assert ConstraintMode.coerce("extremal") is ConstraintMode.EXTREMAL_ONLY


def test_unrefutable_tiny_budget_is_unknown():
    res = prove(FIG_ORDER, ConstraintMode.EXTREMAL_ONLY, max_depth=0)
    assert res.verdict == "unknown"
    assert res.reason
