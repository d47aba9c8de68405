"""Command-line front end: build, query, profile, cost selection, benchmarks.

Every subcommand is a thin adapter over the library; no algorithmic logic
lives here.  Report-producing subcommands write CSV or JSON plus a rendered
PNG figure next to the delimited output (disable with --no-plot).

Exit codes: 0 success, 1 key not found, 2 malformed input or configuration,
3 infeasible cost constraint, 4 capacity exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from . import cost_model as cm
from . import plotting
from .errors import (
    CapacityError,
    ConfigError,
    ConstraintError,
    EmptyInputError,
    InfeasibleConstraintError,
    MalformedInputError,
    MissingSampleError,
    PlindexError,
)
from .index import CLUSTERED, NON_CLUSTERED, IndexConfig, SegmentIndex
from .segmentation import (
    max_error,
    non_linearity_ratio,
    optimal_segmentation,
    shrinking_cone,
)

EXIT_OK = 0
EXIT_NOT_FOUND = 1
EXIT_MALFORMED = 2
EXIT_INFEASIBLE = 3
EXIT_CAPACITY = 4


def _parse_gen(spec: str) -> bench_mod.Dataset:
    """Build a dataset from a generator spec like ``step:n=1000,step_size=100``."""
    name, _, argstr = spec.partition(":")
    if name not in bench_mod.GENERATORS:
        raise ConfigError(
            f"unknown generator {name!r}; choose from {sorted(bench_mod.GENERATORS)}"
        )
    kwargs = {}
    if argstr:
        for part in argstr.split(","):
            k, _, v = part.partition("=")
            if not _:
                raise ConfigError(f"bad generator argument {part!r} (want k=v)")
            kwargs[k.strip()] = float(v) if "." in v else int(v)
    return bench_mod.GENERATORS[name](**kwargs)


def _load_data(args) -> bench_mod.Dataset:
    if getattr(args, "gen", None):
        return _parse_gen(args.gen)
    if getattr(args, "data", None):
        return bench_mod.load_dataset(args.data, args.format, sort=getattr(args, "sort", False))
    raise ConfigError("exactly one of --data or --gen is required")


def _add_data_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--data", help="path to a dataset file")
    g.add_argument("--gen", help="generator spec, e.g. step:n=1000,step_size=100,key_gap=1000000,seed=1")
    p.add_argument(
        "--format",
        default="csv",
        choices=["csv", "binary-le-u64", "binary-le-f64"],
        help="on-disk format of --data",
    )
    p.add_argument("--sort", action="store_true", help="sort unsorted input instead of failing")


def _add_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output directory (default: current directory)")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv")
    p.set_defaults(fmt="json")
    p.add_argument("--no-plot", action="store_true", help="skip figure rendering")


def _outdir(args) -> Path:
    d = Path(args.out) if args.out else Path.cwd()
    d.mkdir(parents=True, exist_ok=True)
    return d


def _write_report(report: bench_mod.BenchReport, outdir: Path, stem: str, fmt: str) -> Path:
    path = outdir / f"{stem}.{fmt}"
    if fmt == "json":
        report.to_json(path)
    else:
        report.to_csv(path)
    return path


def _parse_errors(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"bad error list {text!r} (want comma-separated integers)") from None


# -- subcommands ---------------------------------------------------------------


def cmd_segment(args) -> int:
    dataset = _load_data(args)
    pts = dataset.points()
    segs = shrinking_cone(pts, args.error)
    rows = [
        {
            "start_key": s.start_key,
            "start_loc": s.start_loc,
            "slope": s.slope,
            "n_locs": s.n_locs,
            "end_key": s.end_key,
        }
        for s in segs
    ]
    meta = {
        "dataset": dataset.provenance,
        "error": args.error,
        "segment_count": len(segs),
        "max_realized_error": max_error(pts, segs),
        "non_linearity_ratio": non_linearity_ratio(pts, args.error),
    }
    if args.optimal:
        opt = optimal_segmentation(pts, args.error, max_points=args.optimal_cap)
        meta["optimal_count"] = len(opt)
        meta["greedy_to_optimal_ratio"] = len(segs) / len(opt)
    outdir = _outdir(args)
    report = bench_mod.BenchReport(rows, meta)
    path = _write_report(report, outdir, "segments", args.fmt)
    print(f"{len(segs)} segments, max realized error {meta['max_realized_error']}, "
          f"non-linearity ratio {meta['non_linearity_ratio']:.4g}")
    if args.optimal:
        print(f"optimal count {meta['optimal_count']} "
              f"(ratio {meta['greedy_to_optimal_ratio']:.3f})")
    print(f"wrote {path}")
    if not args.no_plot:
        fig = plotting.plot_segmentation(dataset.keys, segs, outdir / "segments.png")
        print(f"wrote {fig}")
    return EXIT_OK


def cmd_build(args) -> int:
    dataset = _load_data(args)
    config = IndexConfig(
        error=args.error,
        buffer_size=args.buffer_size,
        fanout_b=args.fanout,
        layout=args.layout,
    )
    tree = SegmentIndex.from_arrays(dataset.keys, dataset.payloads, config)
    tree.save(args.index)
    st = tree.stats()
    print(
        f"built index: {st.n_entries} entries, {st.n_segments} segments, "
        f"{st.measured_bytes} index bytes -> {args.index}"
    )
    return EXIT_OK


def cmd_query(args) -> int:
    tree = SegmentIndex.load(args.index)
    payload = tree.lookup(args.key)
    if payload is None:
        print(f"key {args.key}: not found")
        return EXIT_NOT_FOUND
    print(f"key {args.key}: payload {payload}")
    return EXIT_OK


def cmd_range(args) -> int:
    tree = SegmentIndex.load(args.index)
    entries = tree.range(args.lo, args.hi)
    for e in entries:
        print(f"{e.key},{e.payload}")
    print(f"# {len(entries)} entries in [{args.lo}, {args.hi}]", file=sys.stderr)
    return EXIT_OK


def cmd_insert_file(args) -> int:
    tree = SegmentIndex.load(args.index)
    dataset = bench_mod.load_dataset(args.data, args.format, sort=True)
    explicit = dataset.provenance.get("explicit_payloads", False)
    next_payload = tree.count
    for i, (k, p) in enumerate(zip(dataset.keys.tolist(), dataset.payloads.tolist())):
        tree.insert(k, p if explicit else next_payload + i)
    out = args.out or args.index
    tree.save(out)
    st = tree.stats()
    print(f"inserted {dataset.n} keys, now {st.n_entries} entries in "
          f"{st.n_segments} segments -> {out}")
    return EXIT_OK


def cmd_cost(args) -> int:
    dataset = _load_data(args)
    errors = _parse_errors(args.errors)
    if args.profile:
        profile = cm.SegmentCountProfile.from_csv(args.profile)
    else:
        profile = cm.profile_segments(dataset.points(), errors)
    rows = []
    outdir = _outdir(args)
    chosen = None
    constraint = "none"
    best_note = ""
    code = EXIT_OK

    def params_for(e):
        return cm.CostParams(c=args.c_ns, b=args.fanout, f=args.fill, buff=max(1, e // 2))

    try:
        for e in errors:
            params = params_for(e)
            rows.append(
                {
                    "error": e,
                    "segment_count": profile.segments_at(e),
                    "estimated_latency_ns": cm.latency_estimate(e, profile, params),
                    "estimated_size_bytes": cm.size_estimate(e, profile, params),
                }
            )
        if args.latency_ns is not None:
            constraint = f"latency <= {args.latency_ns} ns"
            chosen = _argmin_profiled(errors, profile, params_for, "latency", args.latency_ns)
        elif args.budget_bytes is not None:
            constraint = f"size <= {args.budget_bytes} B"
            chosen = _argmin_profiled(errors, profile, params_for, "size", args.budget_bytes)
    except InfeasibleConstraintError as exc:
        best_note = str(exc)
        code = EXIT_INFEASIBLE
    for row in rows:
        row["chosen"] = row["error"] == chosen
    report = bench_mod.BenchReport(rows, meta={
        "dataset": dataset.provenance,
        "constraint": constraint,
        "chosen_error": chosen,
        "note": best_note,
        "c_ns": args.c_ns,
        "fanout": args.fanout,
        "fill": args.fill,
    })
    path = _write_report(report, outdir, "cost", args.fmt)
    for row in rows:
        mark = " <== selected" if row["chosen"] else ""
        print(f"e={row['error']:>8}  S_e={row['segment_count']:>8}  "
              f"latency~{row['estimated_latency_ns']:>10.1f} ns  "
              f"size~{row['estimated_size_bytes']:>12.0f} B{mark}")
    if chosen is not None:
        print(f"selected error {chosen} under {constraint}")
    elif code == EXIT_INFEASIBLE:
        print(f"infeasible: {best_note}")
    print(f"wrote {path}")
    if not args.no_plot:
        fig = plotting.plot_cost_validation(rows, outdir / "cost.png")
        print(f"wrote {fig}")
    return code


def _argmin_profiled(errors, profile, params_for, kind, limit):
    """Per-candidate params (buff tracks e/2), shared selector semantics."""
    feasible = []
    best = None
    for e in errors:
        params = params_for(e)
        lat = cm.latency_estimate(e, profile, params)
        size = cm.size_estimate(e, profile, params)
        value = lat if kind == "latency" else size
        score = size if kind == "latency" else lat
        best = value if best is None else min(best, value)
        if value <= limit:
            feasible.append((score, -e if kind == "latency" else e, e))
    if not feasible:
        unit = "ns" if kind == "latency" else "B"
        raise InfeasibleConstraintError(
            f"no candidate meets {kind} {limit} {unit} (best achievable {best:.1f} {unit})",
            best_value=best,
        )
    feasible.sort()
    return feasible[0][2]


def cmd_bench(args) -> int:
    dataset = _load_data(args)
    errors = _parse_errors(args.errors)
    outdir = _outdir(args)
    suite = args.suite
    if suite == "lookup":
        report = bench_mod.run_lookup_bench(
            dataset, errors, n_queries=args.queries, rounds=args.rounds, seed=args.seed
        )
        figure = lambda: plotting.plot_lookup_latency(report, outdir / "bench_lookup.png")
    elif suite == "insert":
        report = bench_mod.run_insert_bench(
            dataset, errors, insert_fraction=args.insert_fraction,
            rounds=args.rounds, seed=args.seed,
        )
        figure = lambda: plotting.plot_size_vs_error(
            report.rows, outdir / "bench_insert.png", value_key="insert_ops_s"
        )
    elif suite == "segmenters":
        report = bench_mod.compare_segmenters(dataset, errors, max_points=args.optimal_cap)
        figure = lambda: plotting.plot_size_vs_error(
            [
                {"structure": "greedy", "error": r["error"], "index_bytes": r["greedy_count"]}
                for r in report.rows
            ]
            + [
                {"structure": "optimal", "error": r["error"], "index_bytes": r["optimal_count"]}
                for r in report.rows
            ],
            outdir / "bench_segmenters.png",
        )
    elif suite == "fill-factor":
        buffers = _parse_errors(args.buffer_sizes) if args.buffer_sizes else sorted(
            {1, max(1, errors[0] // 8), max(1, errors[0] // 2)}
        )
        report = bench_mod.fill_factor_sweep(
            dataset, errors[0], buffers, insert_fraction=args.insert_fraction,
            rounds=args.rounds, seed=args.seed,
        )
        figure = lambda: plotting.plot_fill_factor(report.rows, outdir / "bench_fill_factor.png")
    else:
        raise ConfigError(f"unknown suite {suite!r}")
    stem = f"bench_{suite.replace('-', '_')}"
    path = _write_report(report, outdir, stem, args.fmt)
    print(f"{len(report.rows)} rows -> {path}")
    for row in report.rows:
        print("  " + ", ".join(f"{k}={_fmt_cell(v)}" for k, v in row.items()))
    if not args.no_plot:
        print(f"wrote {figure()}")
    return EXIT_OK


def _fmt_cell(v):
    if isinstance(v, float):
        return f"{v:.4g}"
    return v


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="plindex",
        description="Error-bounded piecewise-linear index: build, query, cost model, benchmarks.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("segment", help="segment a dataset and report stats")
    _add_data_args(sp)
    sp.add_argument("--error", type=int, required=True)
    sp.add_argument("--optimal", action="store_true", help="also run the DP oracle")
    sp.add_argument("--optimal-cap", type=int, default=100_000)
    _add_output_args(sp)
    sp.set_defaults(func=cmd_segment)

    sp = sub.add_parser("build", help="bulk load an index and serialize it")
    _add_data_args(sp)
    sp.add_argument("--error", type=int, required=True)
    sp.add_argument("--buffer-size", type=int, default=None)
    sp.add_argument("--fanout", type=int, default=16)
    sp.add_argument("--layout", choices=[CLUSTERED, NON_CLUSTERED], default=CLUSTERED)
    sp.add_argument("--index", required=True, help="output index file")
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("query", help="point lookup against a serialized index")
    sp.add_argument("--index", required=True)
    sp.add_argument("--key", type=float, required=True)
    sp.set_defaults(func=cmd_query)

    sp = sub.add_parser("range", help="range scan against a serialized index")
    sp.add_argument("--index", required=True)
    sp.add_argument("--lo", type=float, required=True)
    sp.add_argument("--hi", type=float, required=True)
    sp.set_defaults(func=cmd_range)

    sp = sub.add_parser("insert-file", help="replay a key file into an index")
    sp.add_argument("--index", required=True)
    sp.add_argument("--data", required=True)
    sp.add_argument(
        "--format", default="csv", choices=["csv", "binary-le-u64", "binary-le-f64"]
    )
    sp.add_argument("--out", help="output index path (default: overwrite --index)")
    sp.set_defaults(func=cmd_insert_file)

    sp = sub.add_parser("cost", help="estimate latency/size and select an error threshold")
    _add_data_args(sp)
    sp.add_argument("--errors", required=True, help="candidate thresholds, e.g. 10,100,1000")
    sp.add_argument("--profile", help="load an (error,segment_count) CSV instead of profiling")
    constraint = sp.add_mutually_exclusive_group()
    constraint.add_argument("--latency-ns", type=float, default=None)
    constraint.add_argument("--budget-bytes", type=float, default=None)
    sp.add_argument("--c-ns", type=float, default=50.0, help="cache-miss constant (ns)")
    sp.add_argument("--fanout", type=int, default=16)
    sp.add_argument("--fill", type=float, default=0.5)
    _add_output_args(sp)
    sp.set_defaults(func=cmd_cost)

    sp = sub.add_parser("bench", help="run a benchmark suite")
    _add_data_args(sp)
    sp.add_argument(
        "--suite", required=True, choices=["lookup", "insert", "segmenters", "fill-factor"]
    )
    sp.add_argument("--errors", required=True)
    sp.add_argument("--buffer-sizes", help="fill-factor suite: comma-separated buffer sizes")
    sp.add_argument("--queries", type=int, default=2000)
    sp.add_argument("--rounds", type=int, default=5)
    sp.add_argument("--insert-fraction", type=float, default=0.2)
    sp.add_argument("--seed", type=int, default=7)
    sp.add_argument("--optimal-cap", type=int, default=100_000)
    _add_output_args(sp)
    sp.set_defaults(func=cmd_bench)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleConstraintError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (MalformedInputError, ConfigError, ConstraintError, EmptyInputError,
            MissingSampleError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except PlindexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
