"""Command-line front end.

Subcommands mirror the library surface: accuracy measures, rubber-band
optimization, order refutation proofs (with transcript replay), neighbour
digraphs and their plane embeddings, cluster/line embeddings, coverage
experiments and the confidence bound.  File formats are the plain-text
ones used by the readers in `ordviz.files`.

Exit codes: 0 success (for `prove`: order refuted), 2 usage or input
error, 3 `prove` finished without a refutation, 4 `prove --check` found
the transcript invalid.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

import numpy as np

from . import files
from .errors import OrdvizError
from .metric import MetricSpace, PointConfig, config_metric_space, neighbour_maps
from .orders import EdgeOrder, edge_order, kendall_tau, order_accuracy
from .represent import RepresentationKind
from .rubberband import RubberBandParams, optimize, optimize_restarts
from .neighbours import (neighbour_digraph, decompose_bi_rooted,
                         plane_nn_feasible, nn_embed_plane, nn_statistics)
from .fnembed import fn_embed_plane
from .cluster import single_linkage, cluster_embed_line, line_embed_bisection
from .experiments import (coverage_experiment, ConfidenceQuery,
                          confidence_lower_bound)
from .prover import ConstraintMode, prove, render_proof, check_proof
from .svg import render_config_svg, write_svg


def _load_space(path: str) -> MetricSpace:
    obj = files.sniff_and_read(path)
    if isinstance(obj, MetricSpace):
        return obj
    if isinstance(obj, PointConfig):
        return config_metric_space(obj)
    raise OrdvizError(f"{path}: expected a distance matrix or points file")


def _load_order(path: str) -> EdgeOrder:
    obj = files.sniff_and_read(path)
    if isinstance(obj, EdgeOrder):
        return obj
    if isinstance(obj, MetricSpace):
        return edge_order(obj)
    if isinstance(obj, PointConfig):
        return edge_order(config_metric_space(obj))
    raise OrdvizError(f"{path}: expected an edge order, matrix or points file")


def _maybe_svg(args, config: PointConfig) -> None:
    if getattr(args, "svg", None):
        coords = config.coords
        if coords.shape[1] == 1:
            coords = np.hstack([coords, np.zeros_like(coords)])
            config = PointConfig(coords=coords, metric=config.metric)
        maps = None
        try:
            maps = neighbour_maps(config_metric_space(config))
        except OrdvizError:
            pass
        write_svg(args.svg, render_config_svg(config, maps))
        print(f"wrote {args.svg}")


def _fmt_frac(x: Fraction) -> str:
    return f"{x} ({float(x):.6f})"


# ------------------------------------------------------------ subcommands

def cmd_accuracy(args) -> int:
    target = _load_order(args.order)
    against = _load_order(args.against)
    acc = order_accuracy(target, against)
    tau = kendall_tau(target, against)
    print(f"order accuracy = {_fmt_frac(acc)}")
    print(f"kendall tau    = {_fmt_frac(tau)}")
    return 0


def cmd_optimize(args) -> int:
    target = _load_order(args.order)
    params = RubberBandParams(fraction=args.fraction,
                              max_epochs=args.max_epochs)
    result = None
    if args.warm_start:
        warm = files.read_points(args.warm_start)
        result = optimize(target, params=params, initial=warm,
                          seed=args.seed, dim=args.dim)
    if result is None or (not result.success and args.restarts > 1):
        rest = optimize_restarts(target, params,
                                 restarts=args.restarts - (1 if result else 0),
                                 seed=args.seed, dim=args.dim)
        if result is None or rest.accuracy > result.accuracy:
            result = rest
    final = result.accuracy_trace[-1]
    print(f"epochs used    = {result.epochs_used}")
    print(f"final accuracy = {_fmt_frac(final)}")
    print(f"success        = {result.success}")
    if args.out:
        files.write_points(args.out, result.config)
        print(f"wrote {args.out}")
    _maybe_svg(args, result.config)
    return 0


def cmd_prove(args) -> int:
    if args.check:
        text = open(args.check, "r", encoding="utf-8").read()
        cr = check_proof(text)
        if cr.ok:
            verdict = "refuted" if cr.refuted else "not refuted"
            print(f"transcript valid: {cr.lines_checked} lines replayed,"
                  f" verdict {verdict}")
            return 0
        print(f"transcript INVALID: {cr.error}", file=sys.stderr)
        return 4
    if not args.order:
        raise OrdvizError("prove needs --order FILE (or --check proof.txt)")
    order = _load_order(args.order)
    mode = ConstraintMode.coerce(args.mode)
    result = prove(order, mode=mode, max_depth=args.max_depth)
    print(f"verdict: {result.verdict}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(render_proof(result))
        print(f"wrote {args.out}")
    return 0 if result.verdict == "refuted" else 3


def cmd_nn(args) -> int:
    space = _load_space(args.dist)
    graph = neighbour_digraph(space, which=args.which)
    for u, v in graph.edges():
        print(f"{u} {v}")
    decomp = decompose_bi_rooted(graph)
    print(f"# decomposition: {'valid' if decomp.valid else decomp.reason}")
    print(f"# components: {len(decomp.components)}")
    if args.check_plane:
        feas = plane_nn_feasible(graph)
        line = f"# plane: {feas.verdict}"
        if feas.reason:
            line += f" ({feas.reason})"
        print(line)
    return 0


def cmd_nnstats(args) -> int:
    stats = nn_statistics(args.n, args.trials, seed=args.seed)
    print(f"trials                = {args.trials}")
    print(f"biroot prob           = {stats.biroot_prob:.4f}")
    print(f"components per point  = {stats.components_per_point:.4f}")
    print(f"plane feasible rate   = {stats.plane_feasible_rate:.4f}")
    return 0


def cmd_embed_farthest(args) -> int:
    space = _load_space(args.dist)
    config = fn_embed_plane(space)
    if args.out:
        files.write_points(args.out, config)
        print(f"wrote {args.out}")
    else:
        for row in config.coords:
            print(" ".join(f"{v:.6f}" for v in row))
    _maybe_svg(args, config)
    return 0


def cmd_embed_cluster(args) -> int:
    space = _load_space(args.dist)
    tree = single_linkage(space)
    rep = cluster_embed_line(tree)
    coords = rep.coords
    if args.out:
        files.write_coords(args.out, coords)
        print(f"wrote {args.out}")
    else:
        for v in coords:
            print(v)
    return 0


def cmd_embed_line(args) -> int:
    space = _load_space(args.dist)
    result = line_embed_bisection(space, seed=args.seed)
    coords = result.representation.coords
    if args.out:
        files.write_coords(args.out, coords)
        print(f"wrote {args.out}")
    else:
        for v in coords:
            print(v)
    if args.certificates:
        with open(args.certificates, "w", encoding="utf-8") as fh:
            fh.write("cut total gamma gamma_prime\n")
            for cert in result.certificates:
                fh.write(f"{cert.cut_weight} {cert.total_weight} "
                         f"{cert.gamma} {cert.gamma_reflected}\n")
        print(f"wrote {args.certificates}")
    print(f"accuracy = {_fmt_frac(result.accuracy)}")
    return 0


def cmd_coverage(args) -> int:
    kind = RepresentationKind[args.kind.upper()]
    result = coverage_experiment(args.n, args.metric, kind,
                                 trials=args.trials, seed=args.seed)
    print(f"distinct structures   = {result.distinct_orders_found}")
    print(f"fraction of possible  = {float(result.fraction_of_factorial):.6f}")
    return 0


def cmd_confidence(args) -> int:
    query = ConfidenceQuery(s=args.s + 0.5, N=args.N, beta=args.beta)
    bound = confidence_lower_bound(query)
    print(f"lower confidence bound on the event probability: {bound:.6f}")
    print(f"upper bound on the complement probability:       {1 - bound:.6f}")
    return 0


# ------------------------------------------------------------- wiring

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ordviz",
        description="order-faithful representation of finite metric spaces")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("accuracy", help="order accuracy of one order"
                       " (or drawing) against another")
    p.add_argument("--order", required=True,
                   help="target: edge-order, matrix or points file")
    p.add_argument("--against", required=True,
                   help="representation to score, same formats")
    p.set_defaults(func=cmd_accuracy)

    p = sub.add_parser("optimize", help="rubber-band order optimization")
    p.add_argument("--order", required=True)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--fraction", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-epochs", type=int, default=400)
    p.add_argument("--restarts", type=int, default=3)
    p.add_argument("--warm-start", default=None,
                   help="points file used as the first start")
    p.add_argument("--out", default=None)
    p.add_argument("--svg", default=None)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("prove", help="attempt to refute an edge order")
    p.add_argument("--order", default=None)
    p.add_argument("--mode", default="full",
                   help="full | extremal (comparison information used)")
    p.add_argument("--max-depth", type=int, default=3)
    p.add_argument("--out", default=None, help="write the proof transcript")
    p.add_argument("--check", default=None, metavar="PROOF",
                   help="replay a transcript instead of proving")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("nn", help="neighbour digraph of a metric space")
    p.add_argument("--dist", required=True)
    p.add_argument("--which", choices=["nearest", "farthest"],
                   default="nearest")
    p.add_argument("--check-plane", action="store_true")
    p.set_defaults(func=cmd_nn)

    p = sub.add_parser("nnstats", help="random-order neighbour statistics")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_nnstats)

    p = sub.add_parser("embed-farthest",
                       help="plane embedding preserving farthest neighbours")
    p.add_argument("--dist", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--svg", default=None)
    p.set_defaults(func=cmd_embed_farthest)

    p = sub.add_parser("embed-cluster",
                       help="line embedding of the single-linkage tree")
    p.add_argument("--dist", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_embed_cluster)

    p = sub.add_parser("embed-line",
                       help="line embedding by recursive balanced bisection")
    p.add_argument("--dist", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--certificates", default=None,
                   help="write per-step cut certificates")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_embed_line)

    p = sub.add_parser("coverage",
                       help="how many structures random samples produce")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--metric", choices=["euclidean", "manhattan"],
                   default="euclidean")
    p.add_argument("--kind", default="order",
                   choices=[k.name.lower() for k in RepresentationKind])
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("confidence",
                       help="one-sided confidence bound for few failures;"
                       " s is the raw failure count and the +1/2 continuity"
                       " correction is applied here")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--beta", type=float, default=0.995)
    p.set_defaults(func=cmd_confidence)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OrdvizError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
