#!/usr/bin/env -S uv run --script
# /// script
# requires-python = ">=3.11"
# dependencies = [
#     "numpy>=1.26",
#     "scipy>=1.11",
# ]
# ///
"""
Run a family of simulations along one axis and report convergence rates.

Axes:
    grid      values are element counts N; rates of the combined L2 error in h
    timestep  values are fixed time steps; rates of the final conservation error in dt
    scheme    values are scheme names; side-by-side comparison, no rates

Usage:
    uv run run_sweep.py --case gaussian --scheme P3 --p 2 --axis grid --values 50,100,200,400
    uv run run_sweep.py --case bubble-600 --scheme P3 --axis timestep --values 3.14e-6,1.57e-6 --jobs 2
    uv run run_sweep.py --case bubble-600 --axis scheme --values P1,P2,P3,E1,E2 --periods 1
"""

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Any

import numpy as np

from config import SCHEMA_VERSION, RunConfig
from diagnostics import convergence_rates
from errors import ConfigError, DGError, NonPositiveError
from run_case import add_run_arguments, config_from_args, configure_logging, run_case, write_csv, write_json

log = logging.getLogger(__name__)

AXES = ("grid", "timestep", "scheme")
SWEEP_FIELDS = (
    "value", "status", "N", "p", "h", "dt", "dt_mean", "steps", "t_final", "divergence_time",
    "max_pressure_error_pct", "final_conservation_error_pct", "l2_combined", "max_constraint_residual",
)


def parse_values(axis: str, text: str) -> list:
    items = [v.strip() for v in text.split(",") if v.strip()]
    if not items:
        raise ConfigError("values", "no sweep values given")
    try:
        if axis == "grid":
            return [int(v) for v in items]
        if axis == "timestep":
            return [float(v) for v in items]
    except ValueError as e:
        raise ConfigError("values", str(e)) from e
    return items


def point_config(base: RunConfig, axis: str, value, out: Path | None) -> RunConfig:
    if axis == "grid":
        cfg = replace(base, N=value)
    elif axis == "timestep":
        cfg = replace(base, dt=value, cfl=None)
    elif axis == "scheme":
        cfg = replace(base, scheme=value)
    else:
        raise ConfigError("axis", f"unknown axis {axis!r}", hint=f"Use one of {AXES}.")
    return replace(cfg, out=str(out / f"{axis}_{value}") if out else None)


def _check_monotone(axis: str, values: list) -> None:
    if axis == "scheme" or len(values) < 2:
        return
    diffs = np.diff(np.asarray(values, dtype=float))
    if not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise ConfigError("values", f"{axis} values must be strictly monotone")


def _rates(axis: str, points: list[dict[str, Any]]) -> dict[str, Any]:
    done = [pt for pt in points if pt.get("status") == "completed"]
    if axis == "grid":
        key, size_key = "l2_combined", "h"
    else:
        key, size_key = "final_conservation_error_pct", "dt"
    usable = [pt for pt in done if pt.get(key) is not None]
    if len(usable) < 2:
        return {"rates": [], "mean_rate": None, "rate_metric": key}
    try:
        rates = convergence_rates([pt[key] for pt in usable], [pt[size_key] for pt in usable])
    except NonPositiveError as e:
        log.warning("rates unavailable: %s", e)
        return {"rates": [], "mean_rate": None, "rate_metric": key, "rate_error": str(e)}
    return {"rates": rates.tolist(), "mean_rate": float(np.mean(rates)), "rate_metric": key}


def run_sweep(base: RunConfig, axis: str, values: list, jobs: int = 1, out: str | None = None) -> dict[str, Any]:
    """
    Run every point and aggregate.

    Diverged points stay in the table; rates use completed points only.
    """
    try:
        if axis not in AXES:
            raise ConfigError("axis", f"unknown axis {axis!r}", hint=f"Use one of {AXES}.")
        _check_monotone(axis, values)
        out_dir = Path(out) if out else None
        configs = [point_config(base, axis, v, out_dir) for v in values]
    except DGError as e:
        return {"success": False, "error": str(e), "hint": e.hint}

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_case, configs))
    else:
        results = [run_case(cfg) for cfg in configs]

    points = []
    for value, result in zip(values, results):
        if not result.get("success"):
            return {"success": False, "error": f"{axis}={value}: {result.get('error')}", "hint": result.get("hint", "")}
        if result["status"] == "diverged":
            log.warning("%s=%s diverged at t=%.6g", axis, value, result["divergence_time"])
        elif result["status"] == "truncated":
            log.warning("%s=%s stopped at max_steps, t=%.6g", axis, value, result["t_final"])
        points.append({"value": value, **result})

    report: dict[str, Any] = {
        "success": True,
        "schema_version": SCHEMA_VERSION,
        "axis": axis,
        "case": base.case,
        "scheme": base.scheme if axis != "scheme" else None,
        "points": points,
    }
    if axis != "scheme":
        report.update(_rates(axis, points))

    if out_dir is not None:
        try:
            rows = [{k: pt.get(k) for k in SWEEP_FIELDS} for pt in points]
            write_csv(out_dir / "sweep.csv", rows, SWEEP_FIELDS)
            write_json(out_dir / "sweep.json", report)
        except OSError as e:
            return {"success": False, "error": f"cannot write outputs: {e}", "hint": "Check --out."}
    return report


def format_text(report: dict[str, Any]) -> str:
    if not report.get("success"):
        return f"Error: {report.get('error')}\nHint: {report.get('hint', '')}"
    lines = [f"{report['case']} sweep over {report['axis']}"]
    for pt in report["points"]:
        metric = pt.get("l2_combined", pt.get("final_conservation_error_pct"))
        lines.append(f"  {pt['value']!s:>12}  {pt['status']:<9}  pressure {pt['max_pressure_error_pct']:.3e}%  metric {metric}")
    if report.get("rates"):
        lines.append("  rates: " + ", ".join(f"{r:.2f}" for r in report["rates"]))
        lines.append(f"  mean rate: {report['mean_rate']:.2f}")
    return "\n".join(lines)


def main():
    parser = argparse.ArgumentParser(
        description="Run a grid, time-step or scheme sweep",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Spatial convergence of the Gaussian wave
  uv run run_sweep.py --case gaussian --scheme P3 --p 3 --axis grid --values 50,100,200,400

  # Temporal energy-conservation convergence, four processes
  uv run run_sweep.py --case bubble-600 --scheme P3 --axis timestep \\
      --values 3.14e-6,1.57e-6,7.85e-7,3.925e-7 --jobs 4 --out runs/dt

  # Compare all schemes on the low-velocity bubble
  uv run run_sweep.py --case bubble-1 --axis scheme --values P1,P2,P3,E1,E2
        """,
    )
    add_run_arguments(parser)
    parser.add_argument("--axis", "-a", choices=AXES, required=True)
    parser.add_argument("--values", required=True, help="Comma-separated sweep values")
    parser.add_argument("--jobs", "-j", type=int, default=1, help="Parallel processes (default: 1)")
    parser.add_argument("--out", "-o", default=None, help="Output directory (one subdirectory per point)")
    parser.add_argument("--format", "-f", choices=["json", "text"], default="json", help="Output format")

    args = parser.parse_args()
    configure_logging(args.verbose)

    try:
        values = parse_values(args.axis, args.values)
        out, args.out = args.out, None
        base = config_from_args(args)
    except DGError as e:
        report = {"success": False, "error": str(e), "hint": e.hint}
    else:
        report = run_sweep(base, args.axis, values, max(args.jobs, 1), out)

    if args.format == "text":
        print(format_text(report))
    else:
        print(json.dumps(report, indent=2))
    if not report.get("success"):
        sys.exit(1)
    sys.exit(0)


if __name__ == "__main__":
    main()
