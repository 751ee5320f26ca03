"""Command-line entry point.

    outage-io validate --bundle DIR
    outage-io shock    --scenario FILE --method {household,kwh,luminosity}
    outage-io run      --bundle DIR --scenario FILE --method M --model M [--top N]
    outage-io grid     --bundle DIR --scenario FILE --out DIR [--formats csv,svg]
    outage-io report   --grid grid.csv --out DIR [--scenario FILE] [--formats csv,svg]

Exit codes: 0 success, 1 domain/validation error (message on stderr), 2 usage error.
Data goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict

from . import _kernels
from .errors import OutageIOError
from .ingest import load_mrio_bundle, load_scenario, scenario_shock
from .models import MODELS, run_model
from .report import all_stats, emit_report, read_grid_csv, run_grid
from .shocks import METHODS

log = logging.getLogger("outage_io")


def _formats(text: str) -> tuple[str, ...]:
    parts = tuple(p.strip() for p in text.split(",") if p.strip())
    bad = [p for p in parts if p not in ("csv", "svg")]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown format(s): {', '.join(bad)}")
    return parts


def _dump(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def cmd_validate(args) -> int:
    table, diag = load_mrio_bundle(args.bundle, with_diagnostics=True)
    print(f"OK {args.bundle}")
    print(f"sectors: {diag.n} across {len(diag.regions)} region(s): {', '.join(diag.regions)}")
    print(f"matrix source: {diag.matrix_source}")
    print(f"max column sum: {diag.max_col_sum:.6g}")
    print(f"spectral radius: {diag.spectral_radius:.6g} (productive: {'yes' if diag.productive else 'no'})")
    print(f"balance residual x-(Ax+F): {diag.consistency_residual:.3g} (tolerance {diag.consistency_tol:.3g})")
    print(f"value-added residual: {diag.value_added_residual:.3g}")
    print(f"currency scale: {table.currency_scale!r} USD per unit; base year: {table.base_year}")
    for w in diag.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return 0


def cmd_shock(args) -> int:
    scenario = load_scenario(args.scenario)
    _dump(scenario_shock(scenario, args.method).as_dict())
    return 0


def cmd_run(args) -> int:
    table = load_mrio_bundle(args.bundle)
    scenario = load_scenario(args.scenario)
    result = run_model(args.model, table, scenario_shock(scenario, args.method))
    out = result.summary()
    out["rankings"] = [asdict(s) for s in result.sector_rankings[: args.top]]
    _dump(out)
    return 0


def cmd_grid(args) -> int:
    table = load_mrio_bundle(args.bundle)
    scenario = load_scenario(args.scenario)
    grid = run_grid(table, scenario, threads=args.threads)
    for cell in grid.unavailable():
        print(f"warning: {cell.model}/{cell.method}: {cell.error}", file=sys.stderr)
    if not grid.available():
        print("error: every grid cell failed", file=sys.stderr)
        return 1
    stats = all_stats(grid)
    emit_report(grid, stats, args.out, args.formats, scenario.validation_estimates, args.top)
    _dump(
        {
            "event_id": grid.event_id,
            "cells": len(grid.available()),
            "shocks": {m: s.as_dict() for m, s in grid.shocks.items()},
            "stats": [asdict(s) for s in stats],
            "note": "domestic_total includes the direct shock; the *_indirect scopes do not",
        }
    )
    return 0


def cmd_report(args) -> int:
    grid = read_grid_csv(args.grid)
    estimates = load_scenario(args.scenario).validation_estimates if args.scenario else ()
    stats = all_stats(grid)
    emit_report(grid, stats, args.out, args.formats, estimates)
    _dump({"event_id": grid.event_id, "stats": [asdict(s) for s in stats]})
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="outage-io", description="GDP impact of power outages via static IO models")
    p.add_argument("-v", "--verbose", action="store_true", help="log debug output to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check an MRIO bundle")
    s.add_argument("--bundle", required=True)
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("shock", help="print one parameterization's demand shock as JSON")
    s.add_argument("--scenario", required=True)
    s.add_argument("--method", required=True, choices=METHODS)
    s.set_defaults(func=cmd_shock)

    s = sub.add_parser("run", help="run one model on one parameterization")
    s.add_argument("--bundle", required=True)
    s.add_argument("--scenario", required=True)
    s.add_argument("--method", required=True, choices=METHODS)
    s.add_argument("--model", required=True, choices=MODELS)
    s.add_argument("--top", type=int, default=10)
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("grid", help="run the full model x parameterization grid and write reports")
    s.add_argument("--bundle", required=True)
    s.add_argument("--scenario", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--formats", type=_formats, default=("csv", "svg"))
    s.add_argument("--threads", type=int, default=None, help="worker threads (default: OUTAGE_IO_THREADS, 0 = auto)")
    s.add_argument("--top", type=int, default=10, help="sectors per cell in rankings.csv")
    s.set_defaults(func=cmd_grid)

    s = sub.add_parser("report", help="recompute statistics and charts from a grid.csv")
    s.add_argument("--grid", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--scenario", help="scenario whose validation_estimates to compare against")
    s.add_argument("--formats", type=_formats, default=("csv", "svg"))
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    _kernels.configure_threads()
    try:
        return args.func(args)
    except OutageIOError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
