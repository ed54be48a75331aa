"""
Read-only measurements on a solution: pressure-equilibrium error, global
total energy and its conservation error, normalized L2 errors, convergence
rates and the equilibrium checks used by the acceptance runs.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from dg_residual import GlobalSolution
from errors import ConfigError, NonPositiveError
from mesh_basis import Discretization, integrate_global
from physics_flux import flow_state
from thermo import MOMENTUM, SECOND, SPECIES, Mixture, energy_derivative_w

log = logging.getLogger(__name__)

CSV_FIELDS = ("t", "pressure_error_pct", "global_energy", "conservation_error_pct")


@dataclass(frozen=True)
class NormalizationRefs:
    rho_r: float = 1.0
    P_r: float = 101325.0
    T_r: float = 298.15

    def __post_init__(self):
        for name in ("rho_r", "P_r", "T_r"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"refs.{name}", "must be positive")

    def state_scales(self, mixture: Mixture) -> np.ndarray:
        """Factors turning (rho*v, P or rho*e_t, C_i) into normalized variables."""
        s = np.empty(SPECIES + mixture.ns)
        s[MOMENTUM] = 1.0 / np.sqrt(self.rho_r * self.P_r)
        s[SECOND] = 1.0 / self.P_r
        s[SPECIES:] = mixture.R0 * self.T_r / self.P_r
        return s


def pressure_error_percent(sol: GlobalSolution, disc: Discretization, mixture: Mixture, P0: float) -> float:
    """max over quadrature points of |P - P0| / P0 * 100."""
    if not P0 > 0:
        raise ConfigError("P0", "reference pressure must be positive")
    s = flow_state(disc.to_quadrature(sol.U), sol.formulation, mixture)
    return float(np.max(np.abs(s.P - P0)) / P0 * 100.0)


def global_energy(sol: GlobalSolution, disc: Discretization, mixture: Mixture) -> float:
    """Integral of rho*e_t over the domain."""
    s = flow_state(disc.to_quadrature(sol.U), sol.formulation, mixture)
    return float(integrate_global(s.rho_et, disc.ops))


def relative_change_percent(value: float, reference: float) -> float:
    return abs(value - reference) / abs(reference) * 100.0


def energy_conservation_error_percent(
    sol_t: GlobalSolution,
    sol_0: GlobalSolution,
    disc: Discretization,
    mixture: Mixture,
) -> float:
    """|E(t) - E(0)| / E(0) * 100 with E the integrated total energy."""
    return relative_change_percent(global_energy(sol_t, disc, mixture), global_energy(sol_0, disc, mixture))


@dataclass
class L2Errors:
    per_component: np.ndarray
    combined: float

    def as_dict(self, names: list[str]) -> dict[str, float]:
        out = {f"l2_{n}": float(e) for n, e in zip(names, self.per_component)}
        out["l2_combined"] = float(self.combined)
        return out


def normalized_l2_error(
    sol: GlobalSolution,
    disc: Discretization,
    exact: Callable[[np.ndarray], np.ndarray],
    refs: NormalizationRefs,
    mixture: Mixture,
) -> L2Errors:
    """
    L2 error in normalized variables.

    ``exact`` maps quadrature coordinates (N, n_q) to states (N, n_q, m) in
    the solution's formulation.
    """
    Uq = disc.to_quadrature(sol.U)
    diff = (Uq - exact(disc.quadrature_coordinates())) * refs.state_scales(mixture)
    per_component = np.sqrt(integrate_global(diff**2, disc.ops))
    return L2Errors(per_component=per_component, combined=float(np.sqrt(np.sum(per_component**2))))


def convergence_rates(errors, sizes) -> np.ndarray:
    """rate_k = log(e_k / e_{k+1}) / log(s_k / s_{k+1})."""
    e = np.asarray(errors, dtype=float)
    s = np.asarray(sizes, dtype=float)
    if e.shape != s.shape or e.ndim != 1 or len(e) < 2:
        raise NonPositiveError("errors and sizes need the same length, at least 2")
    if np.any(~(e > 0)) or np.any(~(s > 0)):
        raise NonPositiveError("errors and sizes must be strictly positive")
    return np.log(e[:-1] / e[1:]) / np.log(s[:-1] / s[1:])


def velocity_deviation(sol: GlobalSolution, mixture: Mixture, v0: float) -> float:
    """Max relative nodal deviation |v - v0| / |v0|."""
    rho = mixture.density(sol.U[..., SPECIES:])
    v = sol.U[..., MOMENTUM] / rho
    return float(np.max(np.abs(v - v0)) / abs(v0))


def max_abs_mass_fraction(sol: GlobalSolution, mixture: Mixture, species: str) -> float:
    """Max nodal |Y_l| of one species."""
    C = sol.U[..., SPECIES:]
    l = mixture.index(species)
    Y = C[..., l] * mixture.W[l] / mixture.density(C)
    return float(np.max(np.abs(Y)))


def global_energy_rate(sol: GlobalSolution, dUdt: np.ndarray, disc: Discretization, mixture: Mixture) -> float:
    """Semidiscrete d/dt of the integrated total energy implied by dU/dt."""
    rates_q = disc.to_quadrature(dUdt)
    if sol.formulation == "energy":
        return float(integrate_global(rates_q[..., SECOND], disc.ops))
    w_q = energy_derivative_w(disc.to_quadrature(sol.U), mixture)
    return float(integrate_global(np.sum(w_q * rates_q, axis=-1), disc.ops))


@dataclass
class DiagnosticsRecord:
    """Time series written as the run CSV."""

    t: list[float] = field(default_factory=list)
    pressure_error_pct: list[float] = field(default_factory=list)
    global_energy: list[float] = field(default_factory=list)
    conservation_error_pct: list[float] = field(default_factory=list)

    def append(self, t: float, pressure_error: float, energy: float) -> None:
        reference = self.global_energy[0] if self.global_energy else energy
        self.t.append(float(t))
        self.pressure_error_pct.append(float(pressure_error))
        self.global_energy.append(float(energy))
        self.conservation_error_pct.append(relative_change_percent(energy, reference))

    def sample(self, sol: GlobalSolution, disc: Discretization, mixture: Mixture, P0: float) -> None:
        self.append(sol.t, pressure_error_percent(sol, disc, mixture, P0), global_energy(sol, disc, mixture))

    def rows(self) -> list[dict[str, float]]:
        return [dict(zip(CSV_FIELDS, values)) for values in zip(
            self.t, self.pressure_error_pct, self.global_energy, self.conservation_error_pct,
        )]

    def __len__(self) -> int:
        return len(self.t)

    @property
    def max_pressure_error(self) -> float:
        return max(self.pressure_error_pct, default=0.0)

    @property
    def final_conservation_error(self) -> float:
        return self.conservation_error_pct[-1] if self.conservation_error_pct else 0.0
