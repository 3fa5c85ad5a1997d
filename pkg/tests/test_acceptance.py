"""Acceptance suite: one test per shipped guarantee.

Each test prints a single ``criterion NN: PASS/FAIL`` line (straight to the
real stdout, so the lines appear even under pytest's capture) and then
asserts.  Parameters and seeds are frozen; everything here is deterministic.
The whole file runs in a few minutes on one core.
"""

import sys
import time
from fractions import Fraction

import numpy as np

from ordviz import (
    ConfidenceQuery,
    ConstraintMode,
    EdgeOrder,
    RepresentationKind,
    check_proof,
    cluster_embed_line,
    cluster_tree_from_merges,
    config_metric_space,
    confidence_lower_bound,
    coverage_experiment,
    decompose_bi_rooted,
    edge_order,
    fejes_toth_delta,
    fn_embed_plane,
    forest_from_children,
    kendall_tau,
    line_embed_bisection,
    neighbour_digraph,
    neighbour_maps,
    nn_embed_plane,
    nn_statistics,
    non_nn_fraction,
    optimize,
    optimize_restarts,
    order_accuracy,
    order_from_rank,
    plane_nn_feasible,
    prove,
    random_cluster_tree,
    random_edge_order,
    sample_config,
    unit_cube,
    verify_cluster_representation,
    width_bound,
)

OUT = sys.__stdout__

# closeness sequence of figure-of-merit for the refutation engine:
# de < ad < ac < ab < ce < be < bc < cd < ae < bd on points a..e
FIG_PAIRS = [(3, 4), (0, 3), (0, 2), (0, 1), (2, 4),
             (1, 4), (1, 2), (2, 3), (0, 4), (1, 3)]


def _crit(num: int, ok: bool, detail: str) -> None:
    print(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'} — {detail}",
          file=OUT, flush=True)
    assert ok, f"criterion {num}: {detail}"


def _brute_accuracy(a: EdgeOrder, b: EdgeOrder) -> Fraction:
    """Quartic-time concordance: compare every pair of pair-ranks."""
    m = len(a.ranks)
    agree = total = 0
    for p in range(m):
        for q in range(p + 1, m):
            total += 1
            agree += (a.ranks[p] < a.ranks[q]) == (b.ranks[p] < b.ranks[q])
    return Fraction(agree, total)


def _order_corpus():
    rng = np.random.default_rng(101)
    pairs = []
    for n in (4, 5, 6, 7, 8):
        for _ in range(100):
            pairs.append((random_edge_order(n, rng), random_edge_order(n, rng)))
    return pairs


def test_01_accuracy_matches_brute_force():
    t0 = time.perf_counter()
    pairs = _order_corpus()
    bad = sum(order_accuracy(a, b) != _brute_accuracy(a, b) for a, b in pairs)
    dt = time.perf_counter() - t0
    _crit(1, bad == 0 and dt < 10.0,
          f"{len(pairs) - bad}/{len(pairs)} exact matches on orders for "
          f"4..8 points in {dt:.1f}s")


def test_02_kendall_identity():
    pairs = _order_corpus()
    bad = sum(kendall_tau(a, b) != 2 * order_accuracy(a, b) - 1
              for a, b in pairs)
    _crit(2, bad == 0,
          f"tau == 2*accuracy - 1 exactly on {len(pairs) - bad}/{len(pairs)} pairs")


def test_03_confidence_reproduction():
    few = 1.0 - confidence_lower_bound(ConfidenceQuery(s=795, N=10_000, beta=0.995))
    many = 1.0 - confidence_lower_bound(ConfidenceQuery(s=4156, N=10_000, beta=0.995))
    ok = 0.9270 <= few <= 0.9275 and 0.596 <= many <= 0.600
    _crit(3, ok,
          f"1-bound = {few:.6f} for 795/10000 and {many:.6f} for 4156/10000")


def test_04_reference_order_refuted_and_replayed():
    t0 = time.perf_counter()
    order = EdgeOrder.from_pairs(5, FIG_PAIRS)
    res = prove(order, ConstraintMode.EXTREMAL_ONLY, max_depth=1)
    rep = check_proof(res.render()) if res.refuted else None
    dt = time.perf_counter() - t0
    ok = res.refuted and rep is not None and rep.ok and rep.refuted and dt < 5.0
    _crit(4, ok,
          f"extremal-only refutation at depth 1, transcript replay "
          f"{'ok' if ok else 'FAILED'}, {dt:.2f}s")


def test_05_drawable_orders_never_refuted():
    t0 = time.perf_counter()
    trials = 100_000
    refuted = 0
    for t in range(trials):
        cfg = sample_config(5, seed=900_000 + t)
        res = prove(edge_order(cfg), ConstraintMode.FULL_ORDER,
                    max_depth=1, lookahead=False)
        refuted += res.refuted
    dt = time.perf_counter() - t0
    _crit(5, refuted == 0,
          f"{refuted}/{trials} drawable 5-point orders refuted in {dt:.0f}s")


def test_06_refutation_yield_on_uniform_orders():
    t0 = time.perf_counter()
    rng = np.random.default_rng(424242)
    trials = 10_000
    count = sum(
        prove(random_edge_order(5, rng), ConstraintMode.FULL_ORDER,
              lookahead=False).refuted
        for _ in range(trials))
    dt = time.perf_counter() - t0
    _crit(6, count >= 100,
          f"{count}/{trials} uniform 5-point orders refuted in {dt:.0f}s "
          f"(earlier reference run: 795)")


def test_07_farthest_embedding_roundtrip():
    t0 = time.perf_counter()
    trials, good = 1000, 0
    for t in range(trials):
        n = 3 + t % 10
        dim = (2, 3, 5)[t % 3]
        cfg = sample_config(n, domain=unit_cube(dim), seed=700_000 + t)
        space = config_metric_space(cfg)
        emb = fn_embed_plane(space)
        d = emb.distance_matrix()
        good += tuple(int(v) for v in d.argmax(axis=1)) == neighbour_maps(space).fn
    dt = time.perf_counter() - t0
    _crit(7, good == trials and dt < 60.0,
          f"{good}/{trials} farthest-neighbour digraphs reproduced in {dt:.0f}s")


def test_08_nn_digraphs_decompose():
    trials, good = 10_000, 0
    for t in range(trials):
        n = 4 + t % 9
        dim = (2, 3, 5)[t % 3]
        cfg = sample_config(n, domain=unit_cube(dim), seed=800_000 + t)
        graph = neighbour_digraph(config_metric_space(cfg))
        good += decompose_bi_rooted(graph).valid
    _crit(8, good == trials,
          f"{good}/{trials} nearest-neighbour digraphs are bi-rooted forests")


def test_09_plane_fanout_and_claimed_fraction():
    five = plane_nn_feasible(forest_from_children([5, 0]))
    emb = nn_embed_plane(decompose_bi_rooted(forest_from_children([4, 3])))
    frac = non_nn_fraction(emb)
    bound = Fraction(7, 9)
    trials, below = 10_000, 0
    for t in range(trials):
        cfg = sample_config(2 + t % 25, seed=650_000 + t)
        below += non_nn_fraction(cfg) <= bound
    ok = five.verdict == "infeasible" and frac == bound and below == trials
    _crit(9, ok,
          f"5-fanout {five.verdict}; 4+3 construction leaves exactly {frac} "
          f"unclaimed; {below}/{trials} planar samples within 7/9")


def test_10_sphere_packing_values():
    d14, d13, d6 = fejes_toth_delta(14), fejes_toth_delta(13), fejes_toth_delta(6)
    ok = (0.975 <= d14 <= 0.985 and 1.012 <= d13 <= 1.016
          and abs(d6 - 2.0 ** 0.5) <= 1e-12)
    _crit(10, ok, f"delta(14)={d14:.4f}, delta(13)={d13:.4f}, delta(6)=sqrt(2)")


def test_11_neighbour_statistics():
    t0 = time.perf_counter()
    big = nn_statistics(10_000, trials=20, seed=7)
    seven = nn_statistics(7, trials=2_000, seed=7)
    dt = time.perf_counter() - t0
    ok = (0.61 <= big.biroot_prob <= 0.63
          and 0.29 <= big.components_per_point <= 0.33
          and seven.plane_feasible_rate >= 0.99)
    _crit(11, ok,
          f"biroot {big.biroot_prob:.4f}, components/point "
          f"{big.components_per_point:.4f} (n=10^4, 20 trials); 7-point plane "
          f"feasibility {seven.plane_feasible_rate:.4f} in {dt:.0f}s")


def test_12_cluster_trees_recoverable_within_width():
    rng = np.random.default_rng(55)
    trials, good = 200, 0
    for _ in range(trials):
        n = int(rng.integers(2, 13))
        tree = random_cluster_tree(n, rng)
        rep = cluster_embed_line(tree)
        good += rep.width <= width_bound(n) and verify_cluster_representation(tree, rep)
    trace = cluster_embed_line(
        cluster_tree_from_merges(3, [((0,), (1,)), ((0, 1), (2,))]))
    ok = good == trials and set(trace.coords) == {0, 1, 3}
    _crit(12, ok,
          f"{good}/{trials} random trees recovered within the width bound; "
          f"3-point trace coords {sorted(trace.coords)}")


def test_13_bisection_certificates():
    t0 = time.perf_counter()
    spaces = [(n, s) for n in (4, 8, 16, 32, 64) for s in range(20)]
    cert_bad = 0
    accs = []
    for k, (n, s) in enumerate(spaces):
        space = config_metric_space(sample_config(n, seed=130_000 + k))
        res = line_embed_bisection(space, seed=s)
        accs.append(float(res.accuracy))
        for cert in res.certificates:
            q = len(cert.part_a) * len(cert.part_b)
            if 2 * cert.cut_weight < cert.total_weight:
                cert_bad += 1
            elif 4 * max(cert.gamma, cert.gamma_reflected) < q * (q - 1):
                cert_bad += 1
    dt = time.perf_counter() - t0
    mean_acc = sum(accs) / len(accs)
    _crit(13, cert_bad == 0,
          f"{cert_bad} certificate violations over {len(spaces)} spaces "
          f"(4..64 points); mean accuracy {mean_acc:.4f} vs reference scale "
          f"3/7 ≈ {3 / 7:.4f} (reported, not asserted); {dt:.0f}s")


def test_14_rubber_band_success_rates():
    t0 = time.perf_counter()
    trials = 200
    wins = selfwins = 0
    for t in range(trials):
        cfg = sample_config(8, seed=140_000 + t)
        target = edge_order(cfg)
        wins += optimize_restarts(target, restarts=3, seed=t).success
        warm = optimize(target, initial=cfg, seed=t)
        selfwins += warm.success and warm.epochs_used == 0
    dt = time.perf_counter() - t0
    ok = wins >= 0.60 * trials and selfwins == trials
    _crit(14, ok,
          f"cold-start success {wins}/{trials} (threshold 120); self-target "
          f"success with zero epochs {selfwins}/{trials}; {dt:.0f}s")


def test_15_sampled_orders_survive_the_prover():
    t0 = time.perf_counter()
    cov = coverage_experiment(5, "euclidean", RepresentationKind.ORDER,
                              trials=10_000, seed=15)
    refuted = 0
    for rank in cov.store.ranks():
        res = prove(order_from_rank(5, int(rank)), ConstraintMode.FULL_ORDER,
                    max_depth=1, lookahead=False)
        refuted += res.refuted
    dt = time.perf_counter() - t0
    _crit(15, refuted == 0,
          f"{refuted}/{cov.distinct_orders_found} geometrically sampled "
          f"orders refuted in {dt:.0f}s")
