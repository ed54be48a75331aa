#!/usr/bin/env -S uv run --script
# /// script
# requires-python = ">=3.11"
# dependencies = [
#     "numpy>=1.26",
#     "scipy>=1.11",
# ]
# ///
"""
Randomized checks of the identities the schemes rely on.

Checks:
    energy_derivative   w against central finite differences of rho*e_t
    face_compatibility  corrected face flux satisfies the energy-flux identity
    jump_term_equilibrium   D_P vanishes across faces with equal P and v
    correction_conservative sum_k r_k = 0 for both correction variants
    correction_constraint   sum_k w_hat_k . r_k = E whenever alpha is active

Usage:
    uv run check_identities.py --seed 7
    uv run check_identities.py --samples 1000 --check energy_derivative -f text
"""

import argparse
import json
import logging
import sys
from typing import Any, Callable

import numpy as np

from corrections import CorrectionConfig, elementwise_correction
from errors import DGError
from physics_flux import FaceTrace, corrected_interface_flux, energy_flux_from_state, face_fluxes, pressure_jump_term_DP
from thermo import Mixture, correction_variables_z, energy_derivative_w, primitive_to_state, total_energy_density
from thermo_parser import load_database, lookup

log = logging.getLogger(__name__)

DEFAULT_SPECIES = ("N2", "NC12H26", "O2")


def random_states(rng: np.random.Generator, mixture: Mixture, n: int, P=None, v=None) -> np.ndarray:
    """Pressure-form states with T in [350, 2000] K, P in [0.1, 10] MPa and |v| <= 500 m/s."""
    T = rng.uniform(350.0, 2000.0, n)
    P = rng.uniform(1e5, 1e7, n) if P is None else np.full(n, float(P))
    v = rng.uniform(-500.0, 500.0, n) if v is None else np.full(n, float(v))
    Y = rng.dirichlet(np.ones(mixture.ns), n)
    return primitive_to_state(v, P, Y, mixture, "pressure", T=T)


def _near_breakpoint(T: np.ndarray, mixture: Mixture, rel: float = 1e-3) -> np.ndarray:
    points = np.concatenate([s.breakpoints() for s in mixture.species] + [np.empty(0)])
    if points.size == 0:
        return np.zeros(T.shape, dtype=bool)
    return np.min(np.abs(T[:, None] - points[None, :]) / points[None, :], axis=1) < rel


def check_energy_derivative(mixture: Mixture, rng: np.random.Generator, samples: int, tol: float = 1e-6) -> dict[str, Any]:
    """Samples whose stencil straddles a table breakpoint are skipped."""
    y = random_states(rng, mixture, samples)
    w = energy_derivative_w(y, mixture)
    rho = mixture.density(y[:, 2:])
    steps = np.empty_like(y)
    # rho*e_t is quadratic in rho*v, so a large step is exact
    steps[:, 0] = 1e-2 * rho * (np.abs(y[:, 0] / rho) + 100.0)
    steps[:, 1] = 1e-5 * y[:, 1]
    steps[:, 2:] = 1e-5 * y[:, 2:].sum(axis=1, keepdims=True)
    fd = np.empty_like(w)
    for k in range(y.shape[1]):
        e = np.zeros(y.shape[1])
        e[k] = 1.0
        h = steps[:, k:k + 1]
        fd[:, k] = (total_energy_density(y + h * e, mixture) - total_energy_density(y - h * e, mixture)) / (2.0 * h[:, 0])
    T = y[:, 1] / (mixture.R0 * y[:, 2:].sum(axis=1))
    keep = ~_near_breakpoint(T, mixture)
    floor = np.array([1.0, 1e-3] + [1.0] * mixture.ns)
    err = (np.abs(fd - w) / np.maximum(np.abs(w), floor))[keep]
    max_err = float(err.max()) if err.size else 0.0
    return {"passed": max_err <= tol, "max_error": max_err, "tolerance": tol, "samples": int(keep.sum())}


def _random_faces(rng: np.random.Generator, mixture: Mixture, n: int, P=None, v=None) -> FaceTrace:
    yp = random_states(rng, mixture, n, P, v)
    ym = random_states(rng, mixture, n, P, v)
    wp, wm = energy_derivative_w(yp, mixture), energy_derivative_w(ym, mixture)
    return FaceTrace(
        y_plus=yp, y_minus=ym, n=rng.choice([-1.0, 1.0], n), formulation="pressure",
        w_plus=wp, w_minus=wm,
        z_plus=correction_variables_z(yp, wp, mixture), z_minus=correction_variables_z(ym, wm, mixture),
    )


def check_face_compatibility(mixture: Mixture, rng: np.random.Generator, samples: int, tol: float = 1e-11) -> dict[str, Any]:
    """Checked on faces where beta is active and [[w]].[[z]] does not cancel badly."""
    trace = _random_faces(rng, mixture, samples)
    flux, beta = corrected_interface_flux(trace, mixture, beta_tol=1e-300)
    ff = face_fluxes(trace, mixture)
    n = trace.normal()[:, None]
    wp, wm = trace.w_plus, trace.w_minus
    Fe_p, Fe_m = energy_flux_from_state(ff.plus), energy_flux_from_state(ff.minus)
    lhs = np.einsum("fm,fm->f", wp, flux - ff.F_plus * n) - np.einsum("fm,fm->f", wm, flux - ff.F_minus * n)
    defect = np.abs(lhs + (Fe_p - Fe_m) * n[:, 0])
    scale = (
        np.abs(wp * flux).sum(axis=1) + np.abs(wp * ff.F_plus).sum(axis=1)
        + np.abs(wm * flux).sum(axis=1) + np.abs(wm * ff.F_minus).sum(axis=1)
        + np.abs(Fe_p) + np.abs(Fe_m)
    )
    dw = wp - wm
    dz = trace.z_plus - trace.z_minus
    conditioned = np.abs((dw * dz).sum(axis=1)) >= 1e-3 * np.abs(dw * dz).sum(axis=1)
    active = (beta != 0) & conditioned
    err = defect[active] / scale[active]
    max_err = float(err.max()) if err.size else 0.0
    return {
        "passed": max_err <= tol,
        "max_error": max_err,
        "tolerance": tol,
        "samples": samples,
        "active_faces": int(active.sum()),
    }


def check_jump_term_equilibrium(mixture: Mixture, rng: np.random.Generator, samples: int, tol: float = 1e-11) -> dict[str, Any]:
    P0, v0 = rng.uniform(1e5, 1e7), rng.uniform(-500.0, 500.0)
    trace = _random_faces(rng, mixture, samples, P=P0, v=v0)
    D = pressure_jump_term_DP(trace, mixture)
    rho_v_jump = np.abs(trace.y_plus[:, 0] - trace.y_minus[:, 0])
    scale = 0.5 * P0 * rho_v_jump / np.minimum(mixture.density(trace.y_plus[:, 2:]), mixture.density(trace.y_minus[:, 2:]))
    err = np.abs(D) / np.maximum(scale, np.finfo(float).tiny)
    return {"passed": bool(err.max() <= tol), "max_error": float(err.max()), "tolerance": tol, "samples": samples}


def _random_corrections(rng, samples, variant):
    n_b, m = 4, 5
    w_hat = rng.normal(size=(samples, n_b, m))
    z_hat = rng.normal(size=(samples, n_b, m))
    E = rng.normal(size=samples)
    cfg = CorrectionConfig(variant, alpha_tol=1e-12)
    return w_hat, elementwise_correction(w_hat, z_hat, E, cfg)


def check_correction_conservative(mixture: Mixture, rng: np.random.Generator, samples: int, tol: float = 1e-12) -> dict[str, Any]:
    worst = 0.0
    for variant in ("original", "modified"):
        _, corr = _random_corrections(rng, samples, variant)
        scale = np.maximum(np.abs(corr.r).max(axis=(1, 2)), np.finfo(float).tiny)
        worst = max(worst, float((np.abs(corr.r.sum(axis=1)).max(axis=1) / scale).max()))
    return {"passed": worst <= tol, "max_error": worst, "tolerance": tol, "samples": 2 * samples}


def check_correction_constraint(mixture: Mixture, rng: np.random.Generator, samples: int, tol: float = 1e-12) -> dict[str, Any]:
    worst = 0.0
    for variant in ("original", "modified"):
        w_hat, corr = _random_corrections(rng, samples, variant)
        active = corr.active
        achieved = np.einsum("ebm,ebm->e", w_hat, corr.r)
        scale = np.abs(w_hat * corr.r).sum(axis=(1, 2)) + np.abs(corr.E)
        err = np.abs(achieved - corr.E) / np.maximum(scale, np.finfo(float).tiny)
        if active.any():
            worst = max(worst, float(err[active].max()))
    return {"passed": worst <= tol, "max_error": worst, "tolerance": tol, "samples": 2 * samples}


CHECKS: dict[str, Callable[..., dict[str, Any]]] = {
    "energy_derivative": check_energy_derivative,
    "face_compatibility": check_face_compatibility,
    "jump_term_equilibrium": check_jump_term_equilibrium,
    "correction_conservative": check_correction_conservative,
    "correction_constraint": check_correction_constraint,
}


def check_identities(
    seed: int = 0,
    samples: int = 1000,
    checks: list[str] | None = None,
    thermo: str = "thermo.dat",
    species: tuple[str, ...] = DEFAULT_SPECIES,
) -> dict[str, Any]:
    """Run the selected checks with one seeded generator."""
    names = checks or list(CHECKS)
    unknown = [c for c in names if c not in CHECKS]
    if unknown:
        return {"success": False, "error": f"unknown check(s): {', '.join(unknown)}", "hint": f"Available: {', '.join(CHECKS)}"}
    try:
        db = load_database(thermo)
        mixture = Mixture(tuple(lookup(db, s) for s in species))
        rng = np.random.default_rng(seed)
        results = {}
        for name in names:
            results[name] = CHECKS[name](mixture, rng, samples)
            log.info("%s: max error %.3e", name, results[name]["max_error"])
    except DGError as e:
        return {"success": False, "error": str(e), "hint": e.hint}
    passed = all(r["passed"] for r in results.values())
    return {"success": passed, "seed": seed, "samples": samples, "checks": results,
            **({} if passed else {"error": "identity check failed", "hint": "See the per-check max_error values."})}


def format_text(result: dict[str, Any]) -> str:
    if "checks" not in result:
        return f"Error: {result.get('error')}\nHint: {result.get('hint', '')}"
    lines = [f"seed {result['seed']}, {result['samples']} samples"]
    for name, r in result["checks"].items():
        mark = "ok  " if r["passed"] else "FAIL"
        lines.append(f"  {mark} {name}: max error {r['max_error']:.3e} (tol {r['tolerance']:.0e})")
    return "\n".join(lines)


def main():
    parser = argparse.ArgumentParser(
        description="Randomized identity checks for the DG schemes",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  uv run check_identities.py --seed 7
  uv run check_identities.py --check energy_derivative --samples 1000 -f text
        """,
    )
    parser.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")
    parser.add_argument("--samples", "-n", type=int, default=1000, help="Random samples per check")
    parser.add_argument("--check", action="append", choices=list(CHECKS), help="Check to run (repeatable; default: all)")
    parser.add_argument("--thermo", default="thermo.dat", help="Thermo file with N2, NC12H26 and O2")
    parser.add_argument("--format", "-f", choices=["json", "text"], default="json", help="Output format")
    parser.add_argument("--verbose", "-v", action="count", default=0, help="Increase log verbosity")

    args = parser.parse_args()
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    result = check_identities(args.seed, args.samples, args.check, args.thermo)

    if args.format == "text":
        print(format_text(result))
    else:
        print(json.dumps(result, indent=2))
    sys.exit(0 if result.get("success") else 1)


if __name__ == "__main__":
    main()
