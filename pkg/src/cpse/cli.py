"""Command-line surface: analyze, surrogate, correlate, inspect.

Exit codes: 0 success, 1 malformed input, 2 computation error. Diagnostics
(including the per-tensor SKIP log) go to stderr; reports go to --out
files or stdout.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import archgraph, report as report_mod, surrogate as surrogate_mod
from .container import read_lmec, write_lmec
from .errors import (
    ContainerError,
    CpseError,
    DivergenceError,
    EnsembleError,
    GraphError,
    ReportError,
    SpectralError,
)
from .pipeline import RunConfig, analyze_container, analyze_sequence

_INPUT_ERRORS = (ContainerError, GraphError, ReportError, OSError, ValueError)
_PIPELINE_ERRORS = (EnsembleError, SpectralError, DivergenceError)


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bins", type=int, default=100, help="histogram bin count")
    p.add_argument("--epsilon", type=float, default=1e-10,
                   help="smoothing added to each bin before normalization")
    p.add_argument("--log-floor", type=float, default=1e-12,
                   help="clamp applied to D_pse before log10")
    p.add_argument("--min-ndim", type=int, default=2,
                   help="eligibility: minimum tensor rank")
    p.add_argument("--min-leading", type=int, default=2,
                   help="eligibility: minimum leading dimension")
    p.add_argument("--include-pattern", default=None, metavar="REGEX",
                   help="eligibility: only layers whose name matches")
    p.add_argument("--log-eigs", action="store_true",
                   help="histogram log10(eigenvalue + 1e-12) instead")
    p.add_argument("--skip-first", action="store_true",
                   help="drop the first (uniform-vs-uniform smoothed) term")
    p.add_argument("--no-gram-2d", action="store_true",
                   help="experimental: use square 2-d weights directly")


def _config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        bins=args.bins,
        epsilon=args.epsilon,
        log_floor=args.log_floor,
        min_ndim=args.min_ndim,
        min_leading=args.min_leading,
        include_pattern=args.include_pattern,
        log_eigs=args.log_eigs,
        skip_first=args.skip_first,
        no_gram_2d=args.no_gram_2d,
    )


def _write_or_print(data: bytes, out: str | None) -> None:
    if out is None:
        sys.stdout.write(data.decode("utf-8"))
    else:
        Path(out).write_bytes(data)


def cmd_analyze(args: argparse.Namespace) -> int:
    config = _config(args)
    container = read_lmec(args.container)

    graph_doc = container.graph
    if args.graph is not None:
        with open(args.graph, "r", encoding="utf-8") as fh:
            graph_doc = json.load(fh)

    analysis = None
    if graph_doc is not None and args.linearize is not None:
        g = archgraph.parse_graph(graph_doc, allow_merge=True)
        order = archgraph.linearize(g, args.linearize)
        by_name = {t.name: t for t in container.layers}
        missing = [n for n in order if n not in by_name]
        if missing:
            raise GraphError(f"unknown layer name '{missing[0]}': not in container")
        result = analyze_sequence([by_name[n] for n in order], config)
        cpse_report = result.report
        analysis = result.analysis
    elif graph_doc is not None:
        g = archgraph.parse_graph(graph_doc)
        cpse_report = archgraph.branched_cpse(g, container, config)
    else:
        result = analyze_container(container, config)
        cpse_report = result.report
        analysis = result.analysis

    _write_or_print(report_mod.emit(cpse_report, "json"), args.out)
    if args.series_out is not None:
        if cpse_report.series is None:
            raise ReportError("branched totals have no single series to export")
        Path(args.series_out).write_bytes(report_mod.emit(cpse_report, "csv"))
    if args.dump_omega is not None:
        if analysis is None:
            raise ReportError("omega dump is only available for a single sequence")
        _dump_tsv(args.dump_omega, (
            (om.depth, analysis.grid.centres, om.values) for om in analysis.omegas
        ))
    if args.dump_density is not None:
        if analysis is None:
            raise ReportError("density dump is only available for a single sequence")
        _dump_tsv(args.dump_density, (
            (j + 1, analysis.grid.centres, d.masses)
            for j, d in enumerate(analysis.densities)
        ))
    return 0


def _dump_tsv(path: str, blocks) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("layer\tbin_centre\tvalue\n")
        for layer, centres, values in blocks:
            for b, v in zip(centres, values):
                fh.write(f"{layer}\t{b!r}\t{v!r}\n")


def cmd_surrogate(args: argparse.Namespace) -> int:
    config = _config(args)
    spec = surrogate_mod.SurrogateSpec(
        sizes=surrogate_mod.parse_sizes(args.sizes), seed=args.seed
    )
    container = surrogate_mod.generate_stack(spec)
    if args.out is not None:
        write_lmec(args.out, container.layers, container.graph)
    trend = surrogate_mod.ergodicity_trend(container, config)
    if trend.config is not None:
        trend.config["surrogate"] = {"sizes": list(spec.sizes), "seed": spec.seed}
    _write_or_print(report_mod.emit(trend, "json"), args.report)
    return 0


def cmd_correlate(args: argparse.Namespace) -> int:
    records = report_mod.load_records_file(args.records)
    reports = report_mod.correlate(records, grouping=args.group)
    _write_or_print(report_mod.emit(reports, "csv"), args.out)
    return 0


def cmd_inspect(args: argparse.Namespace) -> int:
    container = read_lmec(args.container)
    print(f"LMEC v{container.version}: {len(container.layers)} layers")
    offset = 0
    for t in container.layers:
        shape = "x".join(str(d) for d in t.shape)
        print(f"  {t.name}  shape={shape}  dtype={t.dtype}  offset={offset}  nbytes={t.nbytes()}")
        offset += t.nbytes()
    if container.graph is not None:
        g = container.graph
        print(f"graph: root={g.get('root')!r} nodes={len(g.get('nodes', []))} "
              f"edges={len(g.get('edges', []))}")
    else:
        print("graph: none")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cpse",
        description="Spectral-ergodicity complexity of neural-network weights",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="compute the complexity of a weight container")
    p.add_argument("container", help="LMEC file")
    p.add_argument("--graph", default=None, help="architecture graph JSON (overrides embedded)")
    p.add_argument("--linearize", choices=["topological"], default=None,
                   help="flatten the graph to one sequence instead of branch composition")
    p.add_argument("--out", default=None, help="report JSON path (default stdout)")
    p.add_argument("--series-out", default=None, help="distance series CSV path")
    p.add_argument("--dump-omega", default=None, metavar="TSV",
                   help="per-depth ergodicity distributions for plotting")
    p.add_argument("--dump-density", default=None, metavar="TSV",
                   help="per-layer spectral densities for plotting")
    _add_config_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("surrogate", help="generate and analyze a random-matrix stack")
    p.add_argument("--sizes", required=True, help="comma-separated NxM list, e.g. 16x16,32x32")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="write the generated LMEC here")
    p.add_argument("--report", default=None, help="trend report JSON path (default stdout)")
    _add_config_flags(p)
    p.set_defaults(func=cmd_surrogate)

    p = sub.add_parser("correlate", help="correlate complexity against performance records")
    p.add_argument("records", help="CSV with columns architecture,top1,top5,cpse")
    p.add_argument("--group", choices=["prefix", "all"], default="prefix")
    p.add_argument("--out", default=None, help="correlation CSV path (default stdout)")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("inspect", help="print a container's manifest")
    p.add_argument("container", help="LMEC file")
    p.set_defaults(func=cmd_inspect)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, format="%(message)s", level=logging.INFO)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _PIPELINE_ERRORS as exc:
        print(f"cpse: {exc}", file=sys.stderr)
        return 2
    except _INPUT_ERRORS as exc:
        print(f"cpse: {exc}", file=sys.stderr)
        return 1
    except CpseError as exc:
        print(f"cpse: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    raise SystemExit(main())
