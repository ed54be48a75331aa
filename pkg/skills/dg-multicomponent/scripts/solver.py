"""
Scheme registry and the Simulation object that wires a case, a
discretization, the residual and the corrections into an ODE right-hand side.

Usage:
    sim = Simulation.from_config(build_config(overrides={"case": "gaussian", "scheme": "P3"}))
    dUdt = sim.rhs(sim.initial_solution().U, 0.0)
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from cases import CaseSpec, exact_primitive, exact_state_sampler, get_case, initial_state, to_state
from config import RunConfig
from corrections import CorrectionConfig, apply_corrections, correction_scales
from dg_residual import (
    GlobalSolution,
    ResidualBundle,
    assemble_residual_energy,
    assemble_residual_pressure,
    time_derivative,
)
from diagnostics import NormalizationRefs
from errors import ConfigError
from mesh_basis import Discretization, build_discretization
from thermo import SECOND, Mixture, energy_derivative_w
from time_integrator import stable_timestep

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SchemeConfig:
    name: str
    formulation: str
    integration: str
    correction: str = "none"
    energy_flux: str = "lf"
    description: str = ""


SCHEMES: dict[str, SchemeConfig] = {
    "P1": SchemeConfig("P1", "pressure", "overintegrated", "none", "lf",
                       "pressure-based, no correction"),
    "P2": SchemeConfig("P2", "pressure", "overintegrated", "original", "lf",
                       "pressure-based, original correction"),
    "P3": SchemeConfig("P3", "pressure", "overintegrated", "modified", "modified",
                       "pressure-based, modified and face corrections"),
    "E1": SchemeConfig("E1", "energy", "overintegrated", description="total-energy-based, overintegrated"),
    "E2": SchemeConfig("E2", "energy", "colocated", description="total-energy-based, colocated"),
}


def get_scheme(name: str) -> SchemeConfig:
    try:
        return SCHEMES[name]
    except KeyError:
        raise ConfigError("scheme", f"unknown scheme {name!r}", hint=f"Use one of {tuple(SCHEMES)}.") from None


@dataclass
class Simulation:
    case: CaseSpec
    scheme: SchemeConfig
    disc: Discretization
    mixture: Mixture
    correction: CorrectionConfig
    refs: NormalizationRefs
    scales: tuple[np.ndarray, np.ndarray] | None = None
    rhs_evaluations: int = 0
    max_constraint_residual: float = 0.0
    zeroed_alpha: int = 0
    face_corrections: int = 0
    last_bundle: ResidualBundle | None = field(default=None, repr=False)

    @classmethod
    def build(
        cls,
        case: str | CaseSpec,
        scheme: str | SchemeConfig,
        N: int,
        p: int,
        thermo: str | None = None,
        refs: NormalizationRefs | None = None,
        tolerances: dict[str, float] | None = None,
    ) -> "Simulation":
        case = get_case(case) if isinstance(case, str) else case
        scheme = get_scheme(scheme) if isinstance(scheme, str) else scheme
        refs = refs or case.refs
        disc = build_discretization(N, p, scheme.integration, case.x_left, case.x_right)
        mixture = case.mixture(thermo)
        correction = CorrectionConfig(scheme.correction, **(tolerances or {}))
        scales = None
        if correction.variant != "none":
            scales = correction_scales(mixture, refs.rho_r, refs.P_r, refs.T_r, correction.variant)
        return cls(case, scheme, disc, mixture, correction, refs, scales)

    @classmethod
    def from_config(cls, cfg: RunConfig) -> "Simulation":
        return cls.build(cfg.case, cfg.scheme, cfg.N, cfg.p, cfg.thermo, cfg.refs, cfg.tolerances)

    @property
    def formulation(self) -> str:
        return self.scheme.formulation

    def initial_solution(self) -> GlobalSolution:
        U0 = initial_state(self.case, self.disc.node_coordinates(), self.mixture, self.formulation)
        return GlobalSolution(U0, self.formulation, 0.0)

    def source(self, x: np.ndarray, t: float) -> np.ndarray:
        """Manufactured source in the slots of this scheme's formulation."""
        S_p = self.case.manufactured.source(x, t)
        if self.formulation == "pressure":
            return S_p
        # energy equation residual = w . (pressure-form residuals)
        y = to_state(exact_primitive(self.case, x, t), self.mixture, "pressure")
        S = np.array(S_p, copy=True)
        S[..., SECOND] = np.sum(energy_derivative_w(y, self.mixture) * S_p, axis=-1)
        return S

    def residual(self, sol: GlobalSolution) -> ResidualBundle:
        source = self.source if self.case.manufactured is not None else None
        if self.formulation == "energy":
            return assemble_residual_energy(sol, self.disc, self.mixture, source=source)
        bundle = assemble_residual_pressure(sol, self.disc, self.mixture, self.scheme.energy_flux, source=source)
        if self.correction.variant == "none":
            return bundle
        bundle = apply_corrections(sol, bundle, self.correction, self.mixture, self.scales)
        corr = bundle.correction
        self.max_constraint_residual = max(self.max_constraint_residual, corr.max_constraint_residual())
        self.zeroed_alpha += int(np.count_nonzero(~corr.active & ~corr.uniform))
        self.face_corrections += int(np.count_nonzero(corr.beta))
        return bundle

    def rhs(self, U: np.ndarray, t: float) -> np.ndarray:
        self.rhs_evaluations += 1
        bundle = self.residual(GlobalSolution(U, self.formulation, t))
        self.last_bundle = bundle
        return time_derivative(bundle.R, self.disc)

    def dt_rule(self, cfl: float):
        def rule(U: np.ndarray, t: float) -> float:
            return stable_timestep(U, self.disc, self.formulation, self.mixture, cfl)
        return rule

    def exact_sampler(self, t: float):
        return exact_state_sampler(self.case, self.mixture, self.formulation, t)
