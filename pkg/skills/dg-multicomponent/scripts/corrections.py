"""
Energy-conserving correction terms for the pressure-based residual.

Each element gets R = R_tilde + r with a conservative r chosen so that

    sum_k w_hat_k . R_k = surface integral of the total-energy flux

holds per element. The original variant uses r = alpha (w_hat - w_bar); the
modified variant uses r = alpha (z_hat - z_bar), which keeps pressure and
velocity equilibrium. Elements whose coefficients are uniform cannot be
corrected that way, so their faces get a corrected numerical flux instead.
"""

import logging
from dataclasses import dataclass, replace

import numpy as np

from dg_residual import GlobalSolution, ResidualBundle, scatter_face_values, surface_integral
from errors import ConfigError, FormulationError
from mesh_basis import element_average
from physics_flux import FaceTrace, corrected_interface_flux, energy_interface_flux
from thermo import SPECIES, Mixture

log = logging.getLogger(__name__)

VARIANTS = ("none", "original", "modified")


@dataclass(frozen=True)
class CorrectionConfig:
    variant: str = "none"
    alpha_tol: float = 1e-7
    beta_tol: float = 1e-6
    uniform_tol: float = 1e-12
    # None follows the variant: masking is on for "modified" only
    zero_species_masking: bool | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError("correction", f"unknown variant {self.variant!r}", hint=f"Use one of {VARIANTS}.")
        for name in ("alpha_tol", "beta_tol", "uniform_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"tolerances.{name}", "must be positive")

    @property
    def masking(self) -> bool:
        if self.zero_species_masking is None:
            return self.variant == "modified"
        return self.zero_species_masking


@dataclass
class ElementCorrection:
    """Per-element correction data; arrays have a leading element axis."""

    r: np.ndarray
    alpha: np.ndarray
    E: np.ndarray
    denominator: np.ndarray
    used_face_correction: np.ndarray
    uniform: np.ndarray | None = None
    beta: np.ndarray | None = None
    constraint_residual: np.ndarray | None = None

    @property
    def active(self) -> np.ndarray:
        return self.alpha != 0.0

    def max_constraint_residual(self) -> float:
        if self.constraint_residual is None or not self.active.any():
            return 0.0
        return float(np.max(self.constraint_residual[self.active]))


def correction_scales(mixture: Mixture, rho_r: float, P_r: float, T_r: float, variant: str = "modified"):
    """
    Per-slot factors that make w and z nondimensional.

    With the state normalized as rho*v / sqrt(rho_r P_r), P / P_r and
    C_i R0 T_r / P_r, the tolerances on alpha and beta become independent
    of the unit system.
    """
    R0T = mixture.R0 * T_r
    v_r = np.sqrt(P_r / rho_r)
    m = SPECIES + mixture.ns
    s_w = np.empty(m)
    s_w[0], s_w[1], s_w[SPECIES:] = 1.0 / v_r, 1.0, 1.0 / R0T
    if variant != "modified":
        return s_w, s_w.copy()
    s_z = np.empty(m)
    s_z[0] = P_r / (v_r * rho_r * R0T**2)
    s_z[1] = 1.0 / P_r
    s_z[SPECIES:] = 1.0 / R0T
    return s_w, s_z


def energy_consistency_error(R_tilde: np.ndarray, w_hat: np.ndarray, surface_energy) -> np.ndarray:
    """E = surface integral of F_rhoet - sum_k w_hat_k . R_tilde_k (per element)."""
    return np.asarray(surface_energy) - np.einsum("...bm,...bm->...", w_hat, R_tilde)


def zero_species_slots(U: np.ndarray) -> np.ndarray:
    """(N, m) mask of species slots whose element-average concentration is exactly 0."""
    C_bar = element_average(U[..., SPECIES:], axis=-2)
    mask = np.zeros(U.shape[:-2] + (U.shape[-1],), dtype=bool)
    mask[..., SPECIES:] = C_bar == 0.0
    return mask


def elementwise_correction(
    w_hat: np.ndarray,
    z_hat: np.ndarray,
    E,
    cfg: CorrectionConfig,
    scales: tuple[np.ndarray, np.ndarray] | None = None,
    masked_slots: np.ndarray | None = None,
) -> ElementCorrection:
    """
    Correction r for one element (n_b, m) or a stack of elements (N, n_b, m).

    alpha = E / sum_k (w_hat_k - w_bar) . (d_k - d_bar), with d = w_hat for
    the original variant and d = z_hat for the modified one. alpha is zeroed
    when the nondimensionalized denominator is below ``cfg.alpha_tol``.
    Masked slots are zeroed in r and left out of the denominator.
    """
    if cfg.variant == "none":
        raise FormulationError("elementwise correction requested with variant 'none'")
    w_hat = np.asarray(w_hat, dtype=float)
    d = w_hat if cfg.variant == "original" else np.asarray(z_hat, dtype=float)
    dw = w_hat - element_average(w_hat, axis=-2)[..., None, :]
    dd = d - element_average(d, axis=-2)[..., None, :]
    if masked_slots is not None:
        keep = ~np.asarray(masked_slots)[..., None, :]
        dd = np.where(keep, dd, 0.0)
    E = np.asarray(E, dtype=float)

    denominator = np.einsum("...bm,...bm->...", dw, dd)
    if scales is None:
        scaled = denominator
    else:
        s_w, s_z = scales
        scaled = np.einsum("...bm,...bm->...", dw * s_w, dd * s_z)

    negative = scaled < 0
    if np.any(negative):
        log.debug("negative correction denominator on %d element(s); alpha zeroed", int(np.count_nonzero(negative)))
    active = scaled >= cfg.alpha_tol
    alpha = np.divide(E, denominator, out=np.zeros_like(denominator), where=active)
    r = alpha[..., None, None] * dd
    return ElementCorrection(
        r=r,
        alpha=alpha,
        E=E,
        denominator=denominator,
        used_face_correction=np.zeros(np.shape(alpha), dtype=bool),
    )


def is_uniform_element(coefficients: np.ndarray, uniform_tol: float = 1e-12, floor=0.0) -> np.ndarray:
    """
    True where max_k |y_k - y_bar| <= uniform_tol (|y_bar| + floor) in every component.

    ``coefficients`` is (n_b, m) or (N, n_b, m); ``floor`` broadcasts over components.
    """
    U = np.asarray(coefficients, dtype=float)
    y_bar = element_average(U, axis=-2)
    spread = np.max(np.abs(U - y_bar[..., None, :]), axis=-2)
    return np.all(spread <= uniform_tol * (np.abs(y_bar) + floor), axis=-1)


def constraint_residual(R: np.ndarray, w_hat: np.ndarray, surface_energy: np.ndarray) -> np.ndarray:
    """Relative per-element defect of sum_k w_hat_k . R_k = surface energy flux."""
    terms = w_hat * R
    scale = np.abs(terms).sum(axis=(-2, -1)) + np.abs(surface_energy)
    defect = np.abs(terms.sum(axis=(-2, -1)) - surface_energy)
    return np.divide(defect, scale, out=np.zeros_like(defect), where=scale > 0)


def _face_subset(trace: FaceTrace, idx: np.ndarray) -> FaceTrace:
    return FaceTrace(
        y_plus=trace.y_plus[idx], y_minus=trace.y_minus[idx], n=trace.n,
        formulation=trace.formulation,
        w_plus=trace.w_plus[idx], w_minus=trace.w_minus[idx],
        z_plus=trace.z_plus[idx], z_minus=trace.z_minus[idx],
    )


def apply_corrections(
    sol: GlobalSolution,
    bundle: ResidualBundle,
    cfg: CorrectionConfig,
    mixture: Mixture,
    scales: tuple[np.ndarray, np.ndarray] | None = None,
) -> ResidualBundle:
    """
    Corrected residual R = R_tilde + r.

    Uniform elements are flagged first. For the modified variant, faces
    touching a uniform element use the corrected flux, and the total-energy
    face flux is rebuilt from the final face fluxes so every element sees
    the same single-valued value. Non-uniform elements then receive the
    elementwise correction.
    """
    if cfg.variant == "none":
        return bundle
    if sol.formulation != "pressure" or bundle.w_hat is None:
        raise FormulationError("corrections apply to the pressure formulation only")
    U = sol.U
    N = U.shape[0]
    R = np.array(bundle.R, copy=True)
    face_flux = np.array(bundle.face_flux, copy=True)
    face_energy = bundle.face_energy_flux
    masked = zero_species_slots(U) if cfg.masking else None

    floor = np.max(np.abs(U), axis=(0, 1))
    uniform = is_uniform_element(U, cfg.uniform_tol, floor)
    beta = np.zeros(N)

    if cfg.variant == "modified" and uniform.any():
        faces = np.flatnonzero(uniform | np.roll(uniform, -1))
        face_mask = None
        if masked is not None:
            face_mask = (masked & np.roll(masked, -1, axis=0))[faces]
        corrected, beta_f = corrected_interface_flux(
            _face_subset(bundle.trace, faces), mixture, cfg.beta_tol, scales, face_mask,
        )
        delta = np.zeros_like(face_flux)
        delta[faces] = corrected - face_flux[faces]
        scatter_face_values(R, delta)
        face_flux[faces] = corrected
        beta[faces] = beta_f
        face_energy = energy_interface_flux(
            bundle.trace, mixture, "modified", flux=face_flux, fluxes=bundle.fluxes,
        )
    surface = surface_integral(face_energy)

    E = energy_consistency_error(R, bundle.w_hat, surface)
    corr = elementwise_correction(bundle.w_hat, bundle.z_hat, E, cfg, scales, masked)
    corr.alpha = np.where(uniform, 0.0, corr.alpha)
    corr.r = np.where(uniform[:, None, None], 0.0, corr.r)
    R += corr.r

    corr.uniform = uniform
    corr.used_face_correction = uniform & (cfg.variant == "modified")
    corr.beta = beta
    corr.constraint_residual = constraint_residual(R, bundle.w_hat, surface)
    return replace(
        bundle,
        R=R,
        face_flux=face_flux,
        face_energy_flux=face_energy,
        surface_energy=surface,
        correction=corr,
    )
