#!/usr/bin/env -S uv run --script
# /// script
# requires-python = ">=3.11"
# dependencies = [
#     "numpy>=1.26",
#     "scipy>=1.11",
# ]
# ///
"""
Run one simulation and write its time series (CSV) and summary (JSON).

Usage:
    uv run run_case.py --case gaussian --scheme P3 --N 50 --p 2
    uv run run_case.py --config ../data/configs/bubble600_p3.json --out runs/p3
    uv run run_case.py --case bubble-600 --scheme E2 --periods 2 -f text
"""

import argparse
import csv
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any

from config import SCHEMA_VERSION, RunConfig, build_config, load_config_file
from diagnostics import (
    CSV_FIELDS,
    DiagnosticsRecord,
    max_abs_mass_fraction,
    normalized_l2_error,
    velocity_deviation,
)
from dg_residual import GlobalSolution
from errors import DGError
from solver import Simulation
from time_integrator import StepControl, advance

log = logging.getLogger(__name__)

EXIT_COMPLETED, EXIT_ERROR, EXIT_DIVERGED, EXIT_TRUNCATED = 0, 1, 2, 3


def write_csv(path: Path, rows: list[dict[str, Any]], fieldnames) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=list(fieldnames))
        writer.writeheader()
        writer.writerows(rows)


def write_json(path: Path, data: dict[str, Any]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2)
        f.write("\n")


def run_case(cfg: RunConfig) -> dict[str, Any]:
    """
    Integrate one configuration to its end time or to divergence.

    Returns:
        Flat summary with ``success`` (False only for configuration or IO
        errors) and ``status`` ("completed", "diverged", or "truncated" when
        max_steps ran out before the end time).
    """
    record = DiagnosticsRecord()
    try:
        sim = Simulation.from_config(cfg)
        sol0 = sim.initial_solution()
        record.sample(sol0, sim.disc, sim.mixture, sim.case.P0)
        control = StepControl(t_end=cfg.end_time, cfl=None if cfg.dt else cfg.cfl, dt_fixed=cfg.dt, max_steps=cfg.max_steps)
    except DGError as e:
        return {"success": False, "error": str(e), "hint": e.hint}
    case = sim.case
    log.info("running %s with %s: N=%d p=%d t_end=%.6g", case.name, cfg.scheme, cfg.N, cfg.p, cfg.end_time)

    zero_species_max = [0.0]

    def sampler(U, t):
        sol = GlobalSolution(U, sim.formulation, t)
        record.sample(sol, sim.disc, sim.mixture, case.P0)
        if case.zero_species is not None:
            zero_species_max[0] = max(zero_species_max[0], max_abs_mass_fraction(sol, sim.mixture, case.zero_species))
        log.info("t=%.6g pressure_error=%.3e%% conservation_error=%.3e%%",
                 t, record.pressure_error_pct[-1], record.conservation_error_pct[-1])

    started = time.perf_counter()
    outcome = advance(
        sol0.U,
        sim.rhs,
        control,
        dt_rule=sim.dt_rule(cfg.cfl) if cfg.dt is None else None,
        sample_times=cfg.sample_times(),
        sampler=sampler,
        stepper=cfg.stepper,
    )
    wall = time.perf_counter() - started
    final = GlobalSolution(outcome.U, sim.formulation, outcome.t)

    summary: dict[str, Any] = {
        "success": True,
        "schema_version": SCHEMA_VERSION,
        "status": "diverged" if outcome.diverged else "truncated" if outcome.truncated else "completed",
        "case": case.name,
        "scheme": cfg.scheme,
        "N": cfg.N,
        "p": cfg.p,
        "h": sim.disc.mesh.h,
        "cfl": None if cfg.dt else cfg.cfl,
        "dt": cfg.dt,
        "dt_mean": sum(outcome.dt_history) / len(outcome.dt_history) if outcome.dt_history else None,
        "t_end": cfg.end_time,
        "t_final": outcome.t,
        "steps": outcome.steps,
        "rhs_evaluations": sim.rhs_evaluations,
        "divergence_time": outcome.divergence_time,
        "divergence_reason": outcome.reason or None,
        "wall_time_s": wall,
        "max_pressure_error_pct": record.max_pressure_error,
        "final_conservation_error_pct": record.final_conservation_error,
        "max_constraint_residual": sim.max_constraint_residual,
        "zeroed_alpha_count": sim.zeroed_alpha,
        "face_correction_count": sim.face_corrections,
    }
    try:
        if case.v0 is not None:
            summary["velocity_deviation"] = velocity_deviation(final, sim.mixture, case.v0)
        if case.zero_species is not None:
            final_Y = max_abs_mass_fraction(final, sim.mixture, case.zero_species)
            summary[f"max_abs_Y_{case.zero_species}"] = max(zero_species_max[0], final_Y)
        if case.has_exact and outcome.completed:
            errors = normalized_l2_error(final, sim.disc, sim.exact_sampler(outcome.t), sim.refs, sim.mixture)
            names = ["rho_v", "second"] + list(sim.mixture.names)
            summary.update(errors.as_dict(names))
    except DGError as e:
        log.warning("final diagnostics failed: %s", e)

    if cfg.out:
        out = Path(cfg.out)
        try:
            write_csv(out / "timeseries.csv", record.rows(), CSV_FIELDS)
            summary["csv"] = str(out / "timeseries.csv")
            summary["summary_json"] = str(out / "summary.json")
            write_json(out / "summary.json", {**summary, "config": cfg.to_dict()})
        except OSError as e:
            return {"success": False, "error": f"cannot write outputs: {e}", "hint": "Check --out."}
    if outcome.diverged:
        log.warning("%s/%s diverged at t=%.6g", case.name, cfg.scheme, outcome.divergence_time)
    return summary


def exit_code(result: dict[str, Any]) -> int:
    if not result.get("success"):
        return EXIT_ERROR
    status = result.get("status")
    if status == "diverged":
        return EXIT_DIVERGED
    return EXIT_TRUNCATED if status == "truncated" else EXIT_COMPLETED


def format_text(result: dict[str, Any]) -> str:
    if not result.get("success"):
        return f"Error: {result.get('error')}\nHint: {result.get('hint', '')}"
    lines = [f"{result['case']} / {result['scheme']}: {result['status']} at t={result['t_final']:.6g} ({result['steps']} steps)"]
    for key, value in result.items():
        if key in ("success", "case", "scheme", "status", "t_final", "steps"):
            continue
        lines.append(f"  {key}: {value}")
    return "\n".join(lines)


def add_run_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", "-c", default=None, help="JSON config file (or @file)")
    parser.add_argument("--case", default=None, help="Case name: gaussian, bubble-600, bubble-1, bubble-600-o2, mms, uniform-pressure-wave")
    parser.add_argument("--scheme", "-s", choices=["P1", "P2", "P3", "E1", "E2"], default=None)
    parser.add_argument("--p", "-p", type=int, default=None, help="Polynomial degree")
    parser.add_argument("--N", "-N", type=int, default=None, help="Number of elements")
    parser.add_argument("--cfl", type=float, default=None)
    parser.add_argument("--dt", type=float, default=None, help="Fixed time step (overrides --cfl)")
    parser.add_argument("--periods", type=float, default=None, help="End time in advection periods")
    parser.add_argument("--t-end", type=float, default=None, help="End time in seconds (overrides --periods)")
    parser.add_argument("--samples-per-period", type=int, default=None)
    parser.add_argument("--stepper", choices=["ssprk3", "euler"], default=None)
    parser.add_argument("--max-steps", type=int, default=None)
    parser.add_argument("--thermo", default=None, help="Thermo file (default: the case's shipped file)")
    parser.add_argument("--verbose", "-v", action="count", default=0, help="Increase log verbosity")


def config_from_args(args: argparse.Namespace) -> RunConfig:
    file_data = load_config_file(args.config) if args.config else None
    overrides = {
        "case": args.case,
        "scheme": args.scheme,
        "p": args.p,
        "N": args.N,
        "cfl": args.cfl,
        "dt": args.dt,
        "periods": args.periods,
        "t_end": args.t_end,
        "samples_per_period": args.samples_per_period,
        "stepper": args.stepper,
        "max_steps": args.max_steps,
        "thermo": args.thermo,
        "out": getattr(args, "out", None),
    }
    return build_config(file_data, overrides)


def configure_logging(verbose: int) -> None:
    logging.basicConfig(
        level=logging.WARNING - 10 * min(verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )


def main():
    parser = argparse.ArgumentParser(
        description="Run one DG simulation of the multicomponent Euler equations",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Gaussian wave, modified corrections, one period
  uv run run_case.py --case gaussian --scheme P3 --N 50 --p 2

  # High-velocity bubble for two periods, outputs in runs/e2
  uv run run_case.py --case bubble-600 --scheme E2 --periods 2 --out runs/e2

  # From a config file with a flag override
  uv run run_case.py --config ../data/configs/bubble600_p3.json --periods 1

Exit codes: 0 completed, 2 diverged, 3 stopped at --max-steps, 1 configuration or IO error.
        """,
    )
    add_run_arguments(parser)
    parser.add_argument("--out", "-o", default=None, help="Output directory for timeseries.csv and summary.json")
    parser.add_argument("--format", "-f", choices=["json", "text"], default="json", help="Output format")

    args = parser.parse_args()
    configure_logging(args.verbose)

    try:
        cfg = config_from_args(args)
    except DGError as e:
        result = {"success": False, "error": str(e), "hint": e.hint}
    else:
        result = run_case(cfg)

    if not result.get("success"):
        log.error("%s", result.get("error"))
    if args.format == "text":
        print(format_text(result))
    else:
        print(json.dumps(result, indent=2))
    sys.exit(exit_code(result))


if __name__ == "__main__":
    main()
