"""Command-line interface.

Subcommands: generate (graph dump), spectrum (eigen summary / measure CSV),
coeffs (recurrence tables), run (consensus experiment), mse (statistical
experiment on a torus), sweep (alpha/beta grid), reproduce (figure presets).
Exit code 0 on success, 2 on configuration errors.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bench, graphgen, orthopoly, spectral
from .errors import PolygossipError


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", default="grid", choices=graphgen.GRAPH_FAMILIES,
                   help="graph family")
    p.add_argument("--dims", type=int, nargs="+", default=None,
                   help="side lengths for grid/torus/percolation")
    p.add_argument("--n", type=int, default=0, help="vertex count")
    p.add_argument("--d", type=int, default=0,
                   help="degree (random_regular) or ambient dimension (random_geometric)")
    p.add_argument("--p", type=float, default=0.0, help="edge-keep probability")
    p.add_argument("--radius", type=float, default=0.0, help="connection radius")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--largest-component", action="store_true",
                   help="restrict to the largest connected component")


def _add_matrix_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--matrix", default="uniform_degree",
                   choices=("uniform_degree", "adjacency_over_d", "max_neighbor_degree"))
    p.add_argument("--dmax", type=int, default=None,
                   help="uniform_degree override (e.g. ambient lattice degree)")


def _graph_from_args(args) -> graphgen.Graph:
    spec = graphgen.GraphSpec(
        family=args.graph, dims=tuple(args.dims or ()), n=args.n, d=args.d,
        p=args.p, radius=args.radius, seed=args.seed)
    g = graphgen.generate(spec)
    if args.largest_component or args.graph in ("percolation_bond", "random_geometric"):
        g, _ = graphgen.largest_component(g)
    return g


def _open_out(path: str | None):
    return open(path, "w") if path else sys.stdout


def _cmd_generate(args) -> int:
    g = _graph_from_args(args)
    f = _open_out(args.out)
    try:
        graphgen.dump_graph(g, f)
    finally:
        if f is not sys.stdout:
            f.close()
    return 0


def _cmd_spectrum(args) -> int:
    g = _graph_from_args(args)
    W = graphgen.build_gossip_matrix(g, args.matrix, d_max=args.dmax)
    s = spectral.eigendecompose(W, dense_limit=args.dense_limit)
    print(f"n={s.n}")
    print(f"lambda_max={s.eigenvalues[0]:.12g} lambda_min={s.eigenvalues[-1]:.12g}")
    print(f"gap={s.gap:.12g}")
    print(f"absolute_gap={s.absolute_gap:.12g}")
    if args.measure_vertex is not None:
        m = spectral.spectral_measure_at_vertex(s, args.measure_vertex)
        f = _open_out(args.out)
        try:
            f.write("lambda,weight\n")
            for lam, w in zip(m.points, m.weights):
                f.write(f"{lam:.17g},{w:.17g}\n")
        finally:
            if f is not sys.stdout:
                f.close()
    return 0


def _cmd_coeffs(args) -> int:
    if args.recurrence == "jacobi":
        rec = orthopoly.jacobi_recurrence(args.d)
    elif args.recurrence == "jacobi_general":
        rec = orthopoly.jacobi_general_recurrence(args.alpha, args.beta)
    elif args.recurrence == "kesten_mckay":
        rec = orthopoly.kesten_mckay_recurrence(int(args.d))
    elif args.recurrence == "jacobi_gap":
        rec = orthopoly.jacobi_gap_recurrence(args.d, args.gamma)
    else:
        raise PolygossipError(f"unknown recurrence {args.recurrence!r}")
    f = _open_out(args.out)
    try:
        f.write("t,a,b,c\n")
        for t in range(args.tmax + 1):
            c = float(rec.c(t)) if t >= 1 else 0.0
            f.write(f"{t},{float(rec.a(t)):.17g},{float(rec.b(t)):.17g},{c:.17g}\n")
    finally:
        if f is not sys.stdout:
            f.close()
    return 0


def _methods_from_args(args) -> tuple[bench.MethodSpec, ...]:
    return tuple(bench.parse_method(tok) for tok in args.methods.split(","))


def _cmd_run(args) -> int:
    cfg = bench.ExperimentConfig(
        graph_spec=graphgen.GraphSpec(
            family=args.graph, dims=tuple(args.dims or ()), n=args.n, d=args.d,
            p=args.p, radius=args.radius, seed=args.seed),
        matrix_kind=args.matrix, d_max=args.dmax,
        methods=_methods_from_args(args),
        t_max=args.tmax, repetitions=args.reps, seed=args.seed,
        signal_mean=args.mean, signal_std=args.std)
    records = bench.run_consensus_experiment(cfg)
    _write_records(records, args.out)
    return 0


def _cmd_mse(args) -> int:
    dims = tuple(args.dims or ())
    if args.graph not in ("torus", "grid"):
        raise PolygossipError("mse experiments run on torus (or grid) graphs")
    cfg = bench.ExperimentConfig(
        graph_spec=graphgen.GraphSpec(family=args.graph, dims=dims, seed=args.seed),
        matrix_kind=args.matrix, d_max=args.dmax,
        methods=_methods_from_args(args),
        t_max=args.tmax, repetitions=args.reps, seed=args.seed,
        signal_mean=args.mean, signal_std=args.std)
    records = bench.run_mse_experiment(cfg)
    _write_records(records, args.out)
    return 0


def _cmd_sweep(args) -> int:
    cfg = bench.ExperimentConfig(
        graph_spec=graphgen.GraphSpec(
            family=args.graph, dims=tuple(args.dims or ()), n=args.n, d=args.d,
            p=args.p, radius=args.radius, seed=args.seed),
        matrix_kind=args.matrix, d_max=args.dmax,
        methods=(), t_max=args.tmax, repetitions=args.reps, seed=args.seed,
        signal_mean=args.mean, signal_std=args.std)
    pairs = [(a, b) for a in args.alphas for b in args.betas]
    records, flags = bench.run_tuning_sweep(cfg, pairs, d_left=args.d_left,
                                            d_right=args.d_right)
    for alpha, beta, ok in flags:
        print(f"alpha={alpha} beta={beta} in_region={ok}")
    _write_records(records, args.out)
    return 0


def _cmd_reproduce(args) -> int:
    bench.reproduce(args.figure, seed=args.seed, out=args.out or "out.csv")
    return 0


def _write_records(records, path: str | None) -> None:
    if path:
        bench.export_csv(records, path)
    else:
        sys.stdout.write(bench.format_records(records))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polygossip",
                                     description="polynomial-based gossip simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a graph and dump it as text")
    _add_graph_args(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("spectrum", help="eigenvalue summary and spectral measure CSV")
    _add_graph_args(p)
    _add_matrix_args(p)
    p.add_argument("--dense-limit", type=int, default=spectral.DENSE_LIMIT)
    p.add_argument("--measure-vertex", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("coeffs", help="recurrence coefficient table as CSV")
    p.add_argument("--recurrence", required=True,
                   choices=("jacobi", "jacobi_general", "kesten_mckay", "jacobi_gap"))
    p.add_argument("--d", type=float, default=2.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--tmax", type=int, default=20)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_coeffs)

    for name, fn, help_text in (
        ("run", _cmd_run, "consensus experiment, CSV output"),
        ("mse", _cmd_mse, "statistical (MSE) experiment, CSV output"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_graph_args(p)
        _add_matrix_args(p)
        p.add_argument("--methods", default="simple,jacobi:d=2")
        p.add_argument("--tmax", type=int, default=100)
        p.add_argument("--reps", type=int, default=10)
        p.add_argument("--mean", type=float, default=0.0)
        p.add_argument("--std", type=float, default=1.0)
        p.add_argument("--out", default=None)
        p.set_defaults(func=fn)

    p = sub.add_parser("sweep", help="jacobi parameter sweep, CSV output")
    _add_graph_args(p)
    _add_matrix_args(p)
    p.add_argument("--alphas", type=float, nargs="+", required=True)
    p.add_argument("--betas", type=float, nargs="+", required=True)
    p.add_argument("--d-left", type=float, default=None)
    p.add_argument("--d-right", type=float, default=None)
    p.add_argument("--tmax", type=int, default=100)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--mean", type=float, default=0.0)
    p.add_argument("--std", type=float, default=1.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("reproduce", help="run a stored figure preset")
    p.add_argument("--figure", required=True, choices=bench.PRESETS)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_reproduce)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except (PolygossipError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
