"""Command line entry point.

Subcommands::

    gridnav plan <scenario> [--seed N] [--out DIR]
    gridnav simulate <scenario> [--seed N] [--out DIR] [--render ascii|svg]
    gridnav batch <scenario> --seeds A..B [--jobs N] [--out DIR]
    gridnav render <trace> <scenario> [--style ascii|svg] [--output FILE]

Exit codes: 0 success, 1 other failure (including failed batch missions),
2 parse error, 3 validation error, 4 disconnected key point, 5 tick budget
exceeded, 6 inconsistent trace.  ``GRIDNAV_OUT_DIR`` sets the default output
directory (``gridnav-out`` otherwise).
"""

from __future__ import annotations

import argparse
import json
import os
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .errors import (
    DisconnectedKeyPoint,
    GridNavError,
    InconsistentTrace,
    ParseError,
    TickBudgetExceeded,
    ValidationError,
)
from .render import render_trace
from .scenario import describe_scenario, load_scenario
from .sim import format_trace, parse_trace, run_mission
from .tour import anneal, brute_force_tour, nearest_neighbor_tour, pairwise_distances, BRUTE_FORCE_LIMIT

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_DISCONNECTED = 4
EXIT_BUDGET = 5
EXIT_TRACE = 6

OUT_DIR_ENV = "GRIDNAV_OUT_DIR"


def exit_code_for(exc):
    if isinstance(exc, ParseError):
        return EXIT_PARSE
    if isinstance(exc, ValidationError):
        return EXIT_VALIDATION
    if isinstance(exc, DisconnectedKeyPoint):
        return EXIT_DISCONNECTED
    if isinstance(exc, TickBudgetExceeded):
        return EXIT_BUDGET
    if isinstance(exc, InconsistentTrace):
        return EXIT_TRACE
    return EXIT_FAILURE


def default_out_dir():
    return Path(os.environ.get(OUT_DIR_ENV, "gridnav-out"))


def _cell(c):
    return [int(c[0]), int(c[1])]


def cmd_plan(scenario, seed):
    """Plan the tour and return a JSON-serialisable report."""
    from dataclasses import replace

    dm = pairwise_distances(scenario.grid, scenario.keypoints)
    run = anneal(dm, replace(scenario.sa, rng_seed=seed))
    tour = run.tour
    report = {
        "seed": seed,
        "keypoints": [_cell(c) for c in dm.cells],
        "order": list(tour.order),
        "order_cells": [_cell(dm.cells[k]) for k in tour.order],
        "legs": [
            {"from": i, "to": j, "cost": int(dm.d[i, j]), "cells": [_cell(c) for c in dm.path(i, j).cells]}
            for i, j in tour.legs()
        ],
        "total_cost": tour.total_cost,
        "identity_cost": run.identity_cost,
        "nearest_neighbor_cost": nearest_neighbor_tour(dm).total_cost,
        "sa_cost": tour.total_cost,
        "sa_initial_temperature": run.temperature,
        "sa_iterations_per_temperature": run.iterations_per_temperature,
        "convergence": [list(rec) for rec in run.history],
    }
    if dm.n <= BRUTE_FORCE_LIMIT - 1:
        report["brute_force_cost"] = brute_force_tour(dm).total_cost
    return report


def format_plan(report):
    lines = ["order: " + " -> ".join(f"{r},{c}" for r, c in report["order_cells"] + report["order_cells"][:1])]
    for leg in report["legs"]:
        a, b = report["keypoints"][leg["from"]], report["keypoints"][leg["to"]]
        lines.append(f"  leg {a[0]},{a[1]} -> {b[0]},{b[1]}: {leg['cost']}")
    lines.append(f"total cost: {report['total_cost']}")
    lines.append(f"{'identity':>16} {'nearest':>8} {'SA':>8}")
    lines.append(f"{report['identity_cost']:>16} {report['nearest_neighbor_cost']:>8} {report['sa_cost']:>8}")
    conv = report["convergence"]
    if conv:
        step = max(1, len(conv) // 10)
        lines.append("SA convergence (iteration, temperature, current, best):")
        for rec in conv[::step] + ([conv[-1]] if (len(conv) - 1) % step else []):
            lines.append(f"  {rec[0]:>9} {rec[1]:>10.4f} {rec[2]:>6} {rec[3]:>6}")
    return "\n".join(lines)


def _write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def cmd_simulate(scenario, seed, out_dir, render="ascii"):
    """Run one mission and write trace, plan and rendering into ``out_dir``.

    Returns ``(result, files)``; on mission failure the partial trace is still
    written and the exception re-raised.
    """
    out_dir = Path(out_dir)
    files = {"plan": _write(out_dir / "plan.json", json.dumps(cmd_plan(scenario, seed), indent=1))}
    try:
        result, trace = run_mission(scenario, seed)
    except (DisconnectedKeyPoint, TickBudgetExceeded) as exc:
        trace = getattr(exc, "trace", None)
        if trace is not None:
            _write(out_dir / "trace.txt", format_trace(trace))
        raise
    files["trace"] = _write(out_dir / "trace.txt", format_trace(trace))
    ext = "svg" if render == "svg" else "txt"
    files["render"] = _write(
        out_dir / f"coverage.{ext}", render_trace(trace, scenario.grid, render, scenario.keypoints)
    )
    return result, files


def _batch_one(args):
    scenario, seed = args
    try:
        result, _ = run_mission(scenario, seed)
        return {"seed": seed, "success": result.success, "planned_cost": result.planned_cost,
                "executed_cost": result.executed_cost, "ticks": result.ticks, "replans": result.replans,
                "error": None}
    except (DisconnectedKeyPoint, TickBudgetExceeded) as exc:
        return {"seed": seed, "success": False, "planned_cost": exc.result.planned_cost,
                "executed_cost": exc.result.executed_cost, "ticks": exc.result.ticks,
                "replans": exc.result.replans, "error": type(exc).__name__}


def cmd_batch(scenario, seeds, jobs=1):
    work = [(scenario, s) for s in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_batch_one, work))
    else:
        rows = [_batch_one(w) for w in work]
    ok = [r for r in rows if r["success"]]
    costs = [r["executed_cost"] for r in ok]
    summary = {
        "missions": len(rows),
        "successes": len(ok),
        "success_rate": len(ok) / len(rows) if rows else 0.0,
        "executed_cost_mean": statistics.fmean(costs) if costs else None,
        "executed_cost_min": min(costs) if costs else None,
        "executed_cost_max": max(costs) if costs else None,
        "planned_cost_mean": statistics.fmean(r["planned_cost"] for r in ok) if ok else None,
        "ticks_mean": statistics.fmean(r["ticks"] for r in ok) if ok else None,
    }
    return summary, rows


def parse_seed_range(text):
    lo, sep, hi = text.partition("..")
    if not sep:
        raise argparse.ArgumentTypeError("seed range must look like A..B")
    try:
        a, b = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError("seed range bounds must be integers") from None
    if b < a:
        raise argparse.ArgumentTypeError("seed range is empty")
    return range(a, b + 1)


def build_parser():
    parser = argparse.ArgumentParser(prog="gridnav", description="Key-point tour planning and mission simulation.")
    parser.add_argument("--version", action="version", version=f"gridnav {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="plan the key-point tour")
    p.add_argument("scenario")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("simulate", help="run one mission")
    p.add_argument("scenario")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", type=Path)
    p.add_argument("--render", choices=("ascii", "svg"), default="ascii")

    p = sub.add_parser("batch", help="run many seeds and aggregate")
    p.add_argument("scenario")
    p.add_argument("--seeds", type=parse_seed_range, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("render", help="render a saved trace")
    p.add_argument("trace")
    p.add_argument("scenario")
    p.add_argument("--style", choices=("ascii", "svg"), default="ascii")
    p.add_argument("--output", type=Path)
    return parser


def _seed(args, scenario):
    return args.seed if args.seed is not None else scenario.sa.rng_seed


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except GridNavError as exc:
        print(f"gridnav: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exit_code_for(exc)


def _dispatch(args):
    scenario = load_scenario(args.scenario)
    if args.command == "plan":
        report = cmd_plan(scenario, _seed(args, scenario))
        print(describe_scenario(scenario))
        print(format_plan(report))
        path = _write((args.out or default_out_dir()) / "plan.json", json.dumps(report, indent=1))
        print(f"plan written to {path}")
        return EXIT_OK

    if args.command == "simulate":
        out = args.out or default_out_dir()
        try:
            result, files = cmd_simulate(scenario, _seed(args, scenario), out, args.render)
        except (DisconnectedKeyPoint, TickBudgetExceeded) as exc:
            print(f"mission failed: {type(exc).__name__}: {exc}", file=sys.stderr)
            print(f"partial trace in {out / 'trace.txt'}", file=sys.stderr)
            return exit_code_for(exc)
        print(f"success={result.success} planned_cost={result.planned_cost} "
              f"executed_cost={result.executed_cost} ticks={result.ticks} replans={result.replans}")
        for kind, path in files.items():
            print(f"{kind}: {path}")
        return EXIT_OK if result.success else EXIT_FAILURE

    if args.command == "batch":
        summary, rows = cmd_batch(scenario, args.seeds, max(1, args.jobs))
        for key, value in summary.items():
            print(f"{key}={value}")
        if args.out:
            _write(args.out / "batch.json", json.dumps({"summary": summary, "missions": rows}, indent=1))
        return EXIT_OK if summary["successes"] == summary["missions"] else EXIT_FAILURE

    if args.command == "render":
        try:
            text = Path(args.trace).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise InconsistentTrace(f"cannot read trace {args.trace}: {exc}") from None
        doc = render_trace(parse_trace(text), scenario.grid, args.style, scenario.keypoints)
        if args.output:
            _write(args.output, doc)
        else:
            sys.stdout.write(doc)
        return EXIT_OK
    return EXIT_FAILURE  # pragma: no cover - argparse enforces the choices


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
