"""Command-line entry point.

Subcommands: sample, diagnose, hausdorff, estimate, table, graph.
Exit codes: 0 success, 1 usage/parameter error, 2 numerical or evaluator
failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from . import __version__
from .cache import (
    DistanceCache,
    estimate_digest,
    estimate_to_dict,
)
from .cloud_io import load_cloud, save_csv, save_json
from .config import RunConfig, load_config
from .embedding import cached_constants, diagnostics_report
from .errors import (
    EvaluationError,
    GHSpaceError,
    NumericalError,
    ParameterError,
)
from .gh import (
    GH_E2_H2,
    GH_E2_S2,
    GH_S2_H2,
    CandidateGridSpec,
    build_distance_table,
    default_distance_table,
    estimate_gh,
    table_to_dict,
)
from .geometry import (
    H2_R_MAX,
    H2_R_MIN,
    ProductSignature,
    SamplingSpec,
    sample_euclidean_ball,
    sample_hyperbolic_ball,
    sample_sphere_cap,
)
from .hausdorff import hausdorff_accelerated, hausdorff_earlybreak, hausdorff_naive
from .search_space import (
    build_graph,
    export_graph,
    load_graph,
    make_evaluator,
    search_best_first,
    search_exhaustive,
    search_greedy,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2
EXIT_IO = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with code 2
        raise _UsageError(message)


def _emit(payload) -> None:
    print(json.dumps(payload, indent=2))


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        r, t = text.lower().split("x")
        return int(r), int(t)
    except ValueError:
        raise ParameterError(f"grid must look like 100x100, got {text!r}") from None


def build_parser() -> _Parser:
    parser = _Parser(prog="ghspace", description=__doc__)
    parser.add_argument("--version", action="version", version=f"ghspace {__version__}")
    parser.add_argument("--config", metavar="PATH", help="JSON config file")
    parser.add_argument("--threads", type=int, metavar="N", help="worker threads")
    parser.add_argument("--cache", metavar="PATH", help="distance cache file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="discretize a unit ball and write it out")
    p.add_argument("space", choices=["e2", "s2", "h2"])
    p.add_argument("--grid", default="100x100", metavar="RxT")
    p.add_argument("--r-min", type=float, default=None)
    p.add_argument("--r-max", type=float, default=None)
    p.add_argument("--out", required=True, metavar="PATH")
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("diagnose", help="embedding constants and invariant report")
    p.add_argument("--out", metavar="PATH", help="also write the report here")
    p.add_argument("--sup-grid-points", type=int, default=None)

    p = sub.add_parser("hausdorff", help="Hausdorff distance between two cloud files")
    p.add_argument("cloud_a", metavar="A")
    p.add_argument("cloud_b", metavar="B")
    p.add_argument("--algo", choices=["naive", "earlybreak", "tree"], default="tree")
    p.add_argument("--seed", type=int, default=0, help="early-break shuffle seed")

    p = sub.add_parser("estimate", help="distance estimate for one model-space pair")
    p.add_argument("--pair", required=True, choices=["e2h2", "s2h2"])
    p.add_argument("--coarse", metavar="RxT", default=None)
    p.add_argument("--fine", metavar="RxT", default=None)
    p.add_argument("--top-k", type=int, default=None)
    p.add_argument("--offset-steps", type=int, default=None)
    p.add_argument("--offset-range", type=float, nargs=2, default=None,
                   metavar=("LO", "HI"))
    p.add_argument("--offset-axes", default=None,
                   help="comma-separated axes in 1..6")
    p.add_argument("--exhaustive", action="store_true",
                   help="score every candidate at fine resolution")
    p.add_argument("--no-cache", action="store_true")

    p = sub.add_parser("table", help="pairwise distances and graph edge weights")
    p.add_argument("--default", action="store_true",
                   help="use the built-in reference distances (default)")
    p.add_argument("--from-cache", action="store_true",
                   help="override with estimates stored in the cache")
    p.add_argument("--save", action="store_true", help="write the table to the cache")

    p = sub.add_parser("graph", help="signature search space")
    gsub = p.add_subparsers(dest="graph_command", required=True)

    g = gsub.add_parser("build", help="build and export the signature graph")
    g.add_argument("--max-factors", type=int, required=True)
    g.add_argument("--table", metavar="PATH",
                   help="cache file supplying the distance table")
    g.add_argument("--out", required=True, metavar="PATH")
    g.add_argument("--format", choices=["dot", "json"], default=None)

    g = gsub.add_parser("search", help="argmin search over a graph file")
    g.add_argument("--graph", required=True, metavar="PATH")
    g.add_argument("--algo", choices=["exhaustive", "greedy", "bestfirst"],
                   default="exhaustive")
    g.add_argument("--start", metavar="KEY")
    g.add_argument("--budget", type=int, default=None)
    g.add_argument("--eval", required=True, dest="evaluator",
                   help="table:PATH | cmd:COMMAND | synthetic:NAME")
    return parser


def _resolve_config(args) -> RunConfig:
    cfg = load_config(args.config)
    if args.threads is not None:
        cfg = dataclasses.replace(cfg, threads=args.threads)
    if args.cache is not None:
        cfg = dataclasses.replace(cfg, cache_path=args.cache)
    return cfg


def _open_cache(cfg: RunConfig) -> DistanceCache | None:
    return DistanceCache(cfg.cache_path) if cfg.cache_path else None


def _constants(cfg: RunConfig, cache: DistanceCache | None):
    if cache is not None:
        hit = cache.constants_for(cfg.quadrature, cfg.sup_grid_points)
        if hit is not None:
            return hit
    consts = cached_constants(cfg.quadrature, cfg.sup_grid_points)
    if cache is not None:
        cache.store_constants(consts)
        cache.save()
    return consts


def cmd_sample(args, cfg: RunConfig) -> int:
    n_radial, n_angular = _parse_grid(args.grid)
    if args.space == "h2":
        r_min = H2_R_MIN if args.r_min is None else max(args.r_min, H2_R_MIN)
        r_max = H2_R_MAX if args.r_max is None else min(args.r_max, H2_R_MAX)
        spec = SamplingSpec(n_radial, n_angular, r_min, r_max)
        cloud = sample_hyperbolic_ball(spec)
    else:
        r_min = 0.0 if args.r_min is None else args.r_min
        r_max = 1.0 if args.r_max is None else args.r_max
        spec = SamplingSpec(n_radial, n_angular, r_min, r_max)
        cloud = (
            sample_euclidean_ball(spec)
            if args.space == "e2"
            else sample_sphere_cap(spec)
        )
    if args.format == "json":
        save_json(cloud, args.out)
    else:
        save_csv(cloud, args.out)
    _emit(
        {
            "out": args.out,
            "points": cloud.n,
            "chart": cloud.chart,
            "dim": cloud.ambient_dim,
            "r_min": spec.r_min,
            "r_max": spec.r_max,
        }
    )
    return EXIT_OK


def cmd_diagnose(args, cfg: RunConfig) -> int:
    cache = _open_cache(cfg)
    sup = args.sup_grid_points or cfg.sup_grid_points
    cfg = dataclasses.replace(cfg, sup_grid_points=sup)
    consts = _constants(cfg, cache)
    report = diagnostics_report(consts, seed=cfg.seed)
    _emit(report)
    if args.out:
        from pathlib import Path

        Path(args.out).write_text(json.dumps(report, indent=2), encoding="utf-8")
    return EXIT_OK if report["hard_pass"] else EXIT_NUMERIC


def cmd_hausdorff(args, cfg: RunConfig) -> int:
    a = load_cloud(args.cloud_a)
    b = load_cloud(args.cloud_b)
    if args.algo == "naive":
        result = hausdorff_naive(a, b)
    elif args.algo == "earlybreak":
        result = hausdorff_earlybreak(a, b, shuffle_seed=args.seed)
    else:
        result = hausdorff_accelerated(a, b, workers=cfg.threads)
    _emit(
        {
            "algo": args.algo,
            "distance": result.distance,
            "direction_ab": result.direction_ab,
            "direction_ba": result.direction_ba,
            "witness_a": result.witness_a,
            "witness_b": result.witness_b,
        }
    )
    return EXIT_OK


def _grid_from_args(args, cfg: RunConfig) -> CandidateGridSpec:
    grid = cfg.grid
    kwargs = {}
    if args.coarse:
        r, t = _parse_grid(args.coarse)
        kwargs["coarse_cloud_spec"] = SamplingSpec(r, t)
    if args.fine:
        r, t = _parse_grid(args.fine)
        kwargs["fine_cloud_spec"] = SamplingSpec(r, t)
    if args.top_k is not None:
        kwargs["refine_top_k"] = args.top_k
    if args.offset_steps is not None:
        kwargs["offset_steps"] = args.offset_steps
    if args.offset_range is not None:
        kwargs["offset_range"] = tuple(args.offset_range)
    if args.offset_axes is not None:
        try:
            kwargs["offset_axes"] = tuple(
                int(a) for a in args.offset_axes.split(",") if a.strip()
            )
        except ValueError:
            raise ParameterError(f"bad --offset-axes {args.offset_axes!r}") from None
    return dataclasses.replace(grid, **kwargs) if kwargs else grid


def cmd_estimate(args, cfg: RunConfig) -> int:
    if args.no_cache:
        cfg = dataclasses.replace(cfg, cache_path=None)
    cache = _open_cache(cfg)
    grid = _grid_from_args(args, cfg)
    digest = estimate_digest(
        args.pair, grid, cfg.quadrature, cfg.sup_grid_points, args.exhaustive
    )
    if cache is not None:
        hit = cache.estimate_for(digest)
        if hit is not None:
            payload = estimate_to_dict(hit)
            payload["from_cache"] = True
            _emit(payload)
            return EXIT_OK
    consts = _constants(cfg, cache)
    est = estimate_gh(
        args.pair, grid, consts, workers=cfg.threads, exhaustive=args.exhaustive
    )
    if cache is not None:
        cache.store_estimate(digest, est)
        cache.save()
    payload = estimate_to_dict(est)
    payload["from_cache"] = False
    _emit(payload)
    return EXIT_OK


_REFERENCE_WEIGHTS = {"E2-S2": 4.35, "E2-H2": 1.30, "S2-H2": 1.20}
_REFERENCE_DISTANCES = {"E2-S2": GH_E2_S2, "E2-H2": GH_E2_H2, "S2-H2": GH_S2_H2}


def cmd_table(args, cfg: RunConfig) -> int:
    cache = _open_cache(cfg)
    if args.from_cache:
        if cache is None:
            raise ParameterError("--from-cache needs a cache path")
        table = build_distance_table(estimates=cache.estimates())
    else:
        table = default_distance_table()

    rows = []
    for (m1, m2), entry in table.items():
        key = f"{m1.label}-{m2.label}"
        weight = 1.0 / entry.value if entry.value > 0 else None
        note = None
        ref_w = _REFERENCE_WEIGHTS.get(key)
        if ref_w is not None and weight is not None and round(weight, 2) != ref_w:
            note = (
                f"computed weight rounds to {round(weight, 2):.2f} but the "
                f"reference table lists {ref_w:.2f} (likely inverted before rounding)"
            )
        rows.append(
            {
                "pair": key,
                "distance": entry.value,
                "provenance": entry.provenance,
                "weight": weight,
                "reference_distance": _REFERENCE_DISTANCES.get(key),
                "reference_weight": ref_w,
                "note": note,
            }
        )
    payload = {"pairs": rows, "extension_weight": 1.0}
    _emit(payload)
    if args.save:
        if cache is None:
            raise ParameterError("--save needs a cache path")
        cache.store_table(table)
        cache.save()
    return EXIT_OK


def cmd_graph(args, cfg: RunConfig) -> int:
    from pathlib import Path

    if args.graph_command == "build":
        table = None
        if args.table:
            table = DistanceCache(args.table).table()
            if table is None:
                raise ParameterError(f"{args.table}: no distance table section")
        graph = build_graph(args.max_factors, table)
        fmt = args.format or ("dot" if args.out.endswith(".dot") else "json")
        Path(args.out).write_text(export_graph(graph, fmt), encoding="utf-8")
        _emit(
            {
                "out": args.out,
                "format": fmt,
                "nodes": graph.n_nodes,
                "edges": len(graph.edges),
            }
        )
        return EXIT_OK

    graph = load_graph(args.graph)
    evaluator = make_evaluator(args.evaluator)
    start = (
        ProductSignature.from_key(args.start) if args.start else graph.nodes[0]
    )
    if args.algo == "exhaustive":
        result = search_exhaustive(graph, evaluator, workers=cfg.threads)
    elif args.algo == "greedy":
        result = search_greedy(graph, evaluator, start)
    else:
        budget = args.budget if args.budget is not None else graph.n_nodes
        result = search_best_first(graph, evaluator, start, budget)
    _emit(
        {
            "algo": args.algo,
            "best_node": result.best_node.canonical_key,
            "best_value": result.best_value,
            "evaluations": result.evaluations,
            "trajectory": [
                {"node": sig.canonical_key, "value": val}
                for sig, val in result.trajectory
            ],
        }
    )
    return EXIT_OK


_COMMANDS = {
    "sample": cmd_sample,
    "diagnose": cmd_diagnose,
    "hausdorff": cmd_hausdorff,
    "estimate": cmd_estimate,
    "table": cmd_table,
    "graph": cmd_graph,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"ghspace: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --version / --help
        return int(exc.code or 0)
    try:
        cfg = _resolve_config(args)
        return _COMMANDS[args.command](args, cfg)
    except ParameterError as exc:
        print(f"ghspace: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, EvaluationError) as exc:
        print(f"ghspace: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except GHSpaceError as exc:
        print(f"ghspace: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"ghspace: {exc}", file=sys.stderr)
        return EXIT_IO


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
