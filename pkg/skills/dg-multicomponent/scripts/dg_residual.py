"""
Uncorrected DG residual for the energy- and pressure-based formulations.

The semidiscrete system is M dU/dt + R = 0 per element, with

    R = sum_faces phi F_dagger - int phi' F dx              (energy form)
    R = ... + sum_faces phi D + int phi B(y) dy/dx dx        (pressure form)

Face j sits between element j (its right end, interior side, n = +1) and
element j + 1 (periodic). Face quantities are stored once per face.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from errors import DIVERGENCE_ERRORS, FormulationError
from mesh_basis import Discretization, l2_project
from physics_flux import (
    FaceFluxes,
    FaceTrace,
    energy_interface_flux,
    face_fluxes,
    flow_state,
    flux_from_state,
    nonconservative_term,
    pressure_jump_term_DP,
)
from thermo import (
    MOMENTUM,
    SECOND,
    SPECIES,
    Mixture,
    correction_variables_z,
    energy_derivative_w,
)

log = logging.getLogger(__name__)

ENERGY_FLUX_VARIANTS = ("lf", "modified")

# (x_q, t) -> source values at quadrature points, shape (N, n_q, m)
SourceFn = Callable[[np.ndarray, float], np.ndarray]


@dataclass
class GlobalSolution:
    """Nodal coefficients U with shape (N, n_b, m) for one formulation."""

    U: np.ndarray
    formulation: str
    t: float = 0.0

    def copy_with(self, U: np.ndarray, t: float | None = None) -> "GlobalSolution":
        return GlobalSolution(U=U, formulation=self.formulation, t=self.t if t is None else t)


@dataclass
class ResidualBundle:
    R: np.ndarray
    face_flux: np.ndarray
    face_energy_flux: np.ndarray
    surface_energy: np.ndarray
    formulation: str
    trace: FaceTrace | None = None
    fluxes: FaceFluxes | None = None
    w_hat: np.ndarray | None = None
    z_hat: np.ndarray | None = None
    energy_flux_variant: str = "lf"
    # ElementCorrection once corrections were applied
    correction: Any = None


def _face_trace(U: np.ndarray, formulation: str) -> FaceTrace:
    return FaceTrace(
        y_plus=U[:, -1],
        y_minus=np.roll(U[:, 0], -1, axis=0),
        n=1.0,
        formulation=formulation,
    )


def scatter_face_values(R: np.ndarray, face_values: np.ndarray) -> None:
    """Add antisymmetric per-face values to the two adjacent element ends."""
    R[:, -1] += face_values
    R[:, 0] -= np.roll(face_values, 1, axis=0)


def surface_integral(face_values: np.ndarray) -> np.ndarray:
    """Per-element boundary integral of an antisymmetric face quantity."""
    return face_values - np.roll(face_values, 1, axis=0)


def _element_of_failure(Uq: np.ndarray, formulation: str, mixture: Mixture) -> int | None:
    for k in range(Uq.shape[0]):
        try:
            flow_state(Uq[k], formulation, mixture)
        except DIVERGENCE_ERRORS:
            return k
    return None


def _volume_state(U: np.ndarray, disc: Discretization, formulation: str, mixture: Mixture):
    Uq = disc.to_quadrature(U)
    try:
        return Uq, flow_state(Uq, formulation, mixture)
    except DIVERGENCE_ERRORS as e:
        k = _element_of_failure(Uq, formulation, mixture)
        if k is None:
            raise
        raise type(e)(f"{e} (element {k})", e.hint) from e


def _volume_flux_term(Fq: np.ndarray, disc: Discretization) -> np.ndarray:
    ops = disc.ops
    return -np.einsum("qb,q,eqm->ebm", ops.Dq, ops.Wq, Fq)


def _add_source(R: np.ndarray, disc: Discretization, source: SourceFn | None, t: float) -> None:
    if source is None:
        return
    ops = disc.ops
    Sq = source(disc.quadrature_coordinates(), t)
    R -= np.einsum("qb,q,eqm->ebm", ops.Vq, ops.Wq, Sq)


def assemble_residual_energy(
    sol: GlobalSolution,
    disc: Discretization,
    mixture: Mixture,
    source: SourceFn | None = None,
) -> ResidualBundle:
    """Residual of the conservative total-energy formulation (no nonconservative terms)."""
    if sol.formulation != "energy":
        raise FormulationError(f"energy residual called on a {sol.formulation!r} solution")
    U = sol.U
    _, state_q = _volume_state(U, disc, "energy", mixture)
    R = _volume_flux_term(flux_from_state(state_q, "energy"), disc)

    trace = _face_trace(U, "energy")
    ff = face_fluxes(trace, mixture)
    F_dag = ff.lax_friedrichs
    scatter_face_values(R, F_dag)
    _add_source(R, disc, source, sol.t)

    Fe = F_dag[:, SECOND]
    return ResidualBundle(
        R=R,
        face_flux=F_dag,
        face_energy_flux=Fe,
        surface_energy=surface_integral(Fe),
        formulation="energy",
        trace=trace,
        fluxes=ff,
    )


def project_auxiliary(Uq: np.ndarray, disc: Discretization, mixture: Mixture) -> tuple[np.ndarray, np.ndarray]:
    """L2 projections w_hat, z_hat of w and z sampled at the quadrature points."""
    w_q = energy_derivative_w(Uq, mixture)
    z_q = correction_variables_z(Uq, w_q, mixture)
    return l2_project(w_q, disc.ops), l2_project(z_q, disc.ops)


def assemble_residual_pressure(
    sol: GlobalSolution,
    disc: Discretization,
    mixture: Mixture,
    energy_flux: str = "lf",
    source: SourceFn | None = None,
) -> ResidualBundle:
    """
    Residual of the pressure-based formulation.

    Also projects w and z, attaches their face traces and accumulates the
    per-element surface integral of the total-energy flux, using the
    ``energy_flux`` variant ("lf" or "modified").
    """
    if sol.formulation != "pressure":
        raise FormulationError(f"pressure residual called on a {sol.formulation!r} solution")
    if energy_flux not in ENERGY_FLUX_VARIANTS:
        raise FormulationError(f"unknown energy flux variant {energy_flux!r}")
    U = sol.U
    ops = disc.ops
    Uq, state_q = _volume_state(U, disc, "pressure", mixture)
    dUq = disc.gradient_at_quadrature(U)

    R = _volume_flux_term(flux_from_state(state_q, "pressure"), disc)
    Bq = nonconservative_term(Uq, dUq, mixture, "pressure", state=state_q)
    R += np.einsum("qb,q,eqm->ebm", ops.Vq, ops.Wq, Bq)

    w_hat, z_hat = project_auxiliary(Uq, disc, mixture)
    trace = _face_trace(U, "pressure")
    trace.w_plus, trace.w_minus = w_hat[:, -1], np.roll(w_hat[:, 0], -1, axis=0)
    trace.z_plus, trace.z_minus = z_hat[:, -1], np.roll(z_hat[:, 0], -1, axis=0)

    ff = face_fluxes(trace, mixture)
    F_dag = ff.lax_friedrichs
    scatter_face_values(R, F_dag)

    D = pressure_jump_term_DP(trace, mixture)
    R[:, -1, SECOND] += D
    R[:, 0, SECOND] += np.roll(D, 1)
    _add_source(R, disc, source, sol.t)

    Fe = energy_interface_flux(trace, mixture, energy_flux, flux=F_dag, fluxes=ff)
    return ResidualBundle(
        R=R,
        face_flux=F_dag,
        face_energy_flux=Fe,
        surface_energy=surface_integral(Fe),
        formulation="pressure",
        trace=trace,
        fluxes=ff,
        w_hat=w_hat,
        z_hat=z_hat,
        energy_flux_variant=energy_flux,
    )


def time_derivative(R: np.ndarray, disc: Discretization) -> np.ndarray:
    """dU/dt = -M^-1 R per element."""
    return -np.einsum("bc,ecm->ebm", disc.ops.M_inv, R)


def nodal_velocity_rate(U: np.ndarray, dUdt: np.ndarray, mixture: Mixture) -> np.ndarray:
    """d v / dt at the nodes from coefficient rates; same for both formulations."""
    rho = mixture.density(U[..., SPECIES:])
    drho = dUdt[..., SPECIES:] @ mixture.W
    v = U[..., MOMENTUM] / rho
    return (dUdt[..., MOMENTUM] - v * drho) / rho


def nodal_pressure_rate(U: np.ndarray, dUdt: np.ndarray, formulation: str, mixture: Mixture) -> np.ndarray:
    """
    d P / dt at the nodes.

    In the energy form the chain rule goes through the temperature:
    rho cv dT/dt = d(rho u)/dt - sum_i u_i dC_i/dt with
    d(rho u)/dt = d(rho e_t)/dt - v d(rho v)/dt + v^2/2 d rho/dt.
    """
    if formulation == "pressure":
        return np.array(dUdt[..., SECOND], copy=True)
    s = flow_state(U, "energy", mixture)
    R0 = mixture.R0
    dC = dUdt[..., SPECIES:]
    drho = dC @ mixture.W
    d_rho_u = dUdt[..., SECOND] - s.v * dUdt[..., MOMENTUM] + 0.5 * s.v**2 * drho
    cp, h = mixture.molar_cp_h(s.T)
    u = h - R0 * s.T[..., None]
    sum_C = s.C.sum(axis=-1)
    rho_cv = (s.C * (cp - R0)).sum(axis=-1)
    dT = (d_rho_u - (u * dC).sum(axis=-1)) / rho_cv
    return R0 * (sum_C * dT + s.T * dC.sum(axis=-1))


def pressure_equilibrium_functional(sol: GlobalSolution, disc: Discretization, mixture: Mixture) -> np.ndarray:
    """
    Nodal dP/dt implied by the energy-form residual.

    It vanishes under uniform pressure and velocity for a calorically
    perfect gas and is generically nonzero for thermally perfect mixtures.
    """
    bundle = assemble_residual_energy(sol, disc, mixture)
    return nodal_pressure_rate(sol.U, time_derivative(bundle.R, disc), "energy", mixture)
