"""
Physical and numerical fluxes for the energy- and pressure-based formulations.

Conventions: at a face, ``y_plus`` is the state of the element the flux
leaves (interior), ``y_minus`` the neighbour, ``n`` the outward normal of the
plus side (+1 or -1 in 1D). Jumps are ``[[a]] = a_plus - a_minus`` and
averages ``{{a}} = (a_plus + a_minus) / 2``. Everything is vectorized over
leading axes (faces, points).
"""

import logging
from dataclasses import dataclass, replace

import numpy as np

from errors import EnergyFormUnsupported, FormulationError, NonPhysicalState
from thermo import (
    MOMENTUM,
    SECOND,
    SPECIES,
    Mixture,
    energy_state_temperature,
    require_positive,
)

log = logging.getLogger(__name__)

FORMULATIONS = ("energy", "pressure")


@dataclass
class FlowState:
    """Pointwise primitive and thermodynamic quantities of a state array."""

    rho: np.ndarray
    v: np.ndarray
    P: np.ndarray
    T: np.ndarray
    C: np.ndarray
    rho_et: np.ndarray
    gamma: np.ndarray
    c: np.ndarray


def flow_state(y, formulation: str, mixture: Mixture) -> FlowState:
    """Recover rho, v, P, T, rho*e_t, gamma and c from either state ordering."""
    if formulation not in FORMULATIONS:
        raise FormulationError(f"unknown formulation {formulation!r}")
    y = np.asarray(y, dtype=float)
    R0 = mixture.R0
    C = y[..., SPECIES:]
    rho = mixture.density(C)
    sum_C = C.sum(axis=-1)
    require_positive(rho, sum_C)
    v = y[..., MOMENTUM] / rho
    if formulation == "pressure":
        P = y[..., SECOND]
        if np.any(~(P > 0)):
            raise NonPhysicalState("non-positive pressure")
        T = P / (R0 * sum_C)
    else:
        T = energy_state_temperature(y, mixture)
        P = R0 * T * sum_C
    cp, h = mixture.molar_cp_h(T)
    rho_cp = (C * cp).sum(axis=-1)
    rho_cv = rho_cp - R0 * sum_C
    if formulation == "pressure":
        rho_u = (C * (h - R0 * T[..., None])).sum(axis=-1)
        rho_et = rho_u + 0.5 * rho * v**2
    else:
        rho_et = y[..., SECOND]
    gamma = rho_cp / rho_cv
    return FlowState(rho=rho, v=v, P=P, T=T, C=C, rho_et=rho_et, gamma=gamma, c=np.sqrt(gamma * P / rho))


def flux_from_state(s: FlowState, formulation: str) -> np.ndarray:
    F = np.empty(s.C.shape[:-1] + (2 + s.C.shape[-1],))
    F[..., MOMENTUM] = s.rho * s.v**2 + s.P
    if formulation == "energy":
        F[..., SECOND] = s.v * (s.rho_et + s.P)
    else:
        F[..., SECOND] = s.P * s.v
    F[..., SPECIES:] = s.v[..., None] * s.C
    return F


def physical_flux(y, formulation: str, mixture: Mixture) -> np.ndarray:
    """Inviscid flux; the second slot is v(rho*e_t + P) or P v depending on the formulation."""
    return flux_from_state(flow_state(y, formulation, mixture), formulation)


def energy_flux_from_state(s: FlowState) -> np.ndarray:
    """Total-energy flux v (rho*e_t + P)."""
    return s.v * (s.rho_et + s.P)


def _noncons_coefficient(s: FlowState) -> np.ndarray:
    # (rho c^2 - P) / rho with rho c^2 = gamma P
    return (s.gamma - 1.0) * s.P / s.rho


def nonconservative_term(y, dy_dx, mixture: Mixture, formulation: str = "pressure", state: FlowState | None = None) -> np.ndarray:
    """
    B_P(y) : dy/dx, nonzero only in the pressure slot.

    The slot carries (rho c^2 - P) dv/dx written through the chain rule
    dv/dx = (d(rho v)/dx - v sum_i W_i dC_i/dx) / rho.
    """
    if formulation != "pressure":
        raise EnergyFormUnsupported("nonconservative term requested for the energy formulation")
    y = np.asarray(y, dtype=float)
    dy_dx = np.asarray(dy_dx, dtype=float)
    s = state if state is not None else flow_state(y, "pressure", mixture)
    out = np.zeros_like(y)
    dv_part = dy_dx[..., MOMENTUM] - s.v * (dy_dx[..., SPECIES:] @ mixture.W)
    out[..., SECOND] = _noncons_coefficient(s) * dv_part
    return out


@dataclass
class FaceTrace:
    y_plus: np.ndarray
    y_minus: np.ndarray
    n: float | np.ndarray
    formulation: str = "pressure"
    w_plus: np.ndarray | None = None
    w_minus: np.ndarray | None = None
    z_plus: np.ndarray | None = None
    z_minus: np.ndarray | None = None

    def flipped(self) -> "FaceTrace":
        """Same face seen from the other side."""
        return replace(
            self,
            y_plus=self.y_minus, y_minus=self.y_plus, n=-np.asarray(self.n),
            w_plus=self.w_minus, w_minus=self.w_plus,
            z_plus=self.z_minus, z_minus=self.z_plus,
        )

    def normal(self) -> np.ndarray:
        return np.asarray(self.n, dtype=float)


@dataclass
class FaceFluxes:
    plus: FlowState
    minus: FlowState
    F_plus: np.ndarray
    F_minus: np.ndarray
    lam: np.ndarray
    lax_friedrichs: np.ndarray


def face_fluxes(trace: FaceTrace, mixture: Mixture) -> FaceFluxes:
    """Both one-sided states, their fluxes, lambda and the Lax-Friedrichs flux in one pass."""
    sp = flow_state(trace.y_plus, trace.formulation, mixture)
    sm = flow_state(trace.y_minus, trace.formulation, mixture)
    n = trace.normal()
    Fp = flux_from_state(sp, trace.formulation)
    Fm = flux_from_state(sm, trace.formulation)
    lam = np.maximum(np.abs(sp.v * n) + sp.c, np.abs(sm.v * n) + sm.c)
    jump = np.asarray(trace.y_plus, dtype=float) - np.asarray(trace.y_minus, dtype=float)
    n_ = n[..., None] if n.ndim else n
    flux = 0.5 * (Fp + Fm) * n_ + 0.5 * lam[..., None] * jump
    return FaceFluxes(plus=sp, minus=sm, F_plus=Fp, F_minus=Fm, lam=lam, lax_friedrichs=flux)


def wave_speed_estimate(trace: FaceTrace, mixture: Mixture) -> np.ndarray:
    """lambda = max(|v+ . n| + c+, |v- . n| + c-)."""
    sp = flow_state(trace.y_plus, trace.formulation, mixture)
    sm = flow_state(trace.y_minus, trace.formulation, mixture)
    n = trace.normal()
    return np.maximum(np.abs(sp.v * n) + sp.c, np.abs(sm.v * n) + sm.c)


def lax_friedrichs_flux(trace: FaceTrace, mixture: Mixture) -> np.ndarray:
    """{{F(y)}} . n + (lambda / 2) [[y]]."""
    return face_fluxes(trace, mixture).lax_friedrichs


def pressure_jump_term_DP(trace: FaceTrace, mixture: Mixture) -> np.ndarray:
    """
    Pressure-slot value of 1/2 (B_P . n)|_{{y}} (y- - y+).

    The matrix is evaluated at the arithmetic mean of the two state vectors.
    """
    if trace.formulation != "pressure":
        raise EnergyFormUnsupported("jump term requested for the energy formulation")
    yp = np.asarray(trace.y_plus, dtype=float)
    ym = np.asarray(trace.y_minus, dtype=float)
    s = flow_state(0.5 * (yp + ym), "pressure", mixture)
    d = ym - yp
    dv_part = d[..., MOMENTUM] - s.v * (d[..., SPECIES:] @ mixture.W)
    return 0.5 * trace.normal() * _noncons_coefficient(s) * dv_part


def _dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("...m,...m->...", a, b)


def energy_interface_flux(
    trace: FaceTrace,
    mixture: Mixture,
    variant: str = "lf",
    flux: np.ndarray | None = None,
    fluxes: FaceFluxes | None = None,
) -> np.ndarray:
    """
    Numerical total-energy flux.

    ``lf``: {{F_rhoet}} . n + (lambda / 2) [[rho e_t]].
    ``modified``: {{F_rhoet}} . n - {{w^T F}} . n + {{w}}^T F_dagger, with w the
    projected traces on the trace and F_dagger the (possibly corrected) face flux.
    """
    ff = fluxes if fluxes is not None else face_fluxes(trace, mixture)
    n = trace.normal()
    Fe_p = energy_flux_from_state(ff.plus)
    Fe_m = energy_flux_from_state(ff.minus)
    if variant == "lf":
        return 0.5 * (Fe_p + Fe_m) * n + 0.5 * ff.lam * (ff.plus.rho_et - ff.minus.rho_et)
    if variant != "modified":
        raise FormulationError(f"unknown energy flux variant {variant!r}")
    if trace.w_plus is None or trace.w_minus is None:
        raise FormulationError("modified energy flux needs projected w traces")
    F_dag = ff.lax_friedrichs if flux is None else flux
    wp, wm = np.asarray(trace.w_plus), np.asarray(trace.w_minus)
    avg_wF = 0.5 * (_dot(wp, ff.F_plus) + _dot(wm, ff.F_minus))
    return 0.5 * (Fe_p + Fe_m) * n - avg_wF * n + _dot(0.5 * (wp + wm), F_dag)


def corrected_interface_flux(
    trace: FaceTrace,
    mixture: Mixture,
    beta_tol: float = 1e-6,
    scales: tuple[np.ndarray, np.ndarray] | None = None,
    masked_slots: np.ndarray | None = None,
    fluxes: FaceFluxes | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Face-corrected flux F_dagger = F_LF + beta [[z]].

    beta makes the flux satisfy
        w+ . (F_dagger - F(y+) n) - w- . (F_dagger - F(y-) n) = -[[F_rhoet]] . n
    and is zeroed when the (nondimensionalized) denominator [[w]]^T [[z]]
    is below ``beta_tol``.

    Args:
        scales: Per-slot factors (s_w, s_z) that nondimensionalize w and z
            for the tolerance test
        masked_slots: Boolean (..., m) slots removed from [[z]] and the denominator

    Returns:
        (flux, beta)
    """
    if trace.w_plus is None or trace.z_plus is None:
        raise FormulationError("face correction needs projected w and z traces")
    ff = fluxes if fluxes is not None else face_fluxes(trace, mixture)
    n = trace.normal()
    wp, wm = np.asarray(trace.w_plus), np.asarray(trace.w_minus)
    dw = wp - wm
    dz = np.asarray(trace.z_plus) - np.asarray(trace.z_minus)
    if masked_slots is not None:
        dz = np.where(masked_slots, 0.0, dz)

    F_lf = ff.lax_friedrichs
    dFe = energy_flux_from_state(ff.plus) - energy_flux_from_state(ff.minus)
    numerator = -dFe * n - _dot(dw, F_lf) + (_dot(wp, ff.F_plus) - _dot(wm, ff.F_minus)) * n
    denominator = _dot(dw, dz)
    if scales is None:
        scaled = denominator
    else:
        s_w, s_z = scales
        scaled = _dot(dw * s_w, dz * s_z)

    active = scaled >= beta_tol
    beta = np.divide(numerator, denominator, out=np.zeros_like(denominator, dtype=float),
                     where=active & (denominator != 0))
    if np.any(~active & (denominator != 0)):
        log.debug("beta zeroed on %d face(s)", int(np.count_nonzero(~active)))
    return F_lf + beta[..., None] * dz, beta
