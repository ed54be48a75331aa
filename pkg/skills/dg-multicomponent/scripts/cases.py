"""
Test cases: initial conditions, exact solutions and the manufactured source.

Every case lives on a periodic 1D domain and is selected by name through
``get_case``. Initial conditions are primitive fields; ``initial_state``
interpolates them at the nodal points into either state ordering.

Usage:
    case = get_case("bubble-600")
    mixture = case.mixture()
    U0 = initial_state(case, disc.node_coordinates(), mixture, "pressure")
"""

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from diagnostics import NormalizationRefs
from errors import CaseHasNoExact, UnknownCase
from thermo import MOMENTUM, SECOND, SPECIES, R_UNIVERSAL, Mixture, primitive_to_state
from thermo_parser import load_database, lookup

log = logging.getLogger(__name__)


@dataclass
class Primitive:
    """Velocity, pressure, mass fractions (..., ns) and either rho or T."""

    v: np.ndarray
    P: np.ndarray
    Y: np.ndarray
    rho: np.ndarray | None = None
    T: np.ndarray | None = None


@dataclass(frozen=True)
class CaseSpec:
    name: str
    species: tuple[str, ...]
    thermo_source: str
    initial: Callable[[np.ndarray], Primitive]
    R0: float = R_UNIVERSAL
    x_left: float = -0.5
    x_right: float = 0.5
    v0: float | None = None
    P0: float = 1.0
    manufactured: "ManufacturedSolution | None" = None
    zero_species: str | None = None
    refs: NormalizationRefs = field(default_factory=NormalizationRefs)
    # run defaults
    N: int = 25
    p: int = 3
    cfl: float = 0.6
    periods: float = 1.0
    samples_per_period: int = 1
    description: str = ""

    @property
    def length(self) -> float:
        return self.x_right - self.x_left

    @property
    def period(self) -> float:
        """Time to advect the solution once across the domain."""
        speed = self.v0 if self.v0 is not None else 1.0
        return self.length / abs(speed)

    @property
    def has_exact(self) -> bool:
        return self.manufactured is not None or self.v0 is not None

    def mixture(self, thermo_path: str | None = None) -> Mixture:
        db = load_database(thermo_path or self.thermo_source)
        return Mixture(tuple(lookup(db, name) for name in self.species), R0=self.R0)


def init_gaussian_wave(x) -> Primitive:
    """Two fictitious species advected at v = 5 with a density bump at x = 0."""
    x = np.asarray(x, dtype=float)
    Y1 = 0.5 * (np.sin(2.0 * np.pi * x) + 1.0)
    return Primitive(
        v=np.full_like(x, 5.0),
        P=np.full_like(x, 2.0),
        Y=np.stack([Y1, 1.0 - Y1], axis=-1),
        rho=np.exp(-500.0 * x**2) + 4.0,
    )


BUBBLE_T_MIN = 363.0
BUBBLE_T_MAX = 900.0
BUBBLE_P = 6.0e6


def init_thermal_bubble(x, v0: float = 600.0, extra_species: int = 0) -> Primitive:
    """
    Nitrogen / n-dodecane bubble at 6 MPa; species order (N2, NC12H26, ...).

    ``extra_species`` appends that many species with zero mass fraction.
    """
    x = np.asarray(x, dtype=float)
    profile = np.tanh(25.0 * np.abs(x) - 5.0)
    Y_fuel = 0.5 * (1.0 - profile)
    T = 0.5 * (BUBBLE_T_MIN + BUBBLE_T_MAX) + 0.5 * (BUBBLE_T_MAX - BUBBLE_T_MIN) * profile
    columns = [1.0 - Y_fuel, Y_fuel] + [np.zeros_like(x)] * extra_species
    return Primitive(
        v=np.full_like(x, float(v0)),
        P=np.full_like(x, BUBBLE_P),
        Y=np.stack(columns, axis=-1),
        T=T,
    )


def init_uniform_pressure_wave(x) -> Primitive:
    """Single calorically perfect species, constant P and v, sinusoidal density."""
    x = np.asarray(x, dtype=float)
    return Primitive(
        v=np.ones_like(x),
        P=np.ones_like(x),
        Y=np.ones(x.shape + (1,)),
        rho=1.0 + 0.2 * np.sin(2.0 * np.pi * x),
    )


@dataclass(frozen=True)
class ManufacturedSolution:
    """
    Smooth periodic single-species fields for the pressure-based equations:

        rho = 1 + a_rho sin(theta), v = 1 + a_v sin(theta), P = 1 + a_P cos(theta)

    with theta = 2 pi (x - t).
    """

    gamma: float = 1.4
    W: float = 1.0
    a_rho: float = 0.2
    a_v: float = 0.1
    a_P: float = 0.1

    def fields(self, x, t: float):
        theta = 2.0 * np.pi * (np.asarray(x, dtype=float) - t)
        s, c = np.sin(theta), np.cos(theta)
        rho = 1.0 + self.a_rho * s
        v = 1.0 + self.a_v * s
        P = 1.0 + self.a_P * c
        return rho, v, P, (self.a_rho * c, self.a_v * c, -self.a_P * s)

    def primitive(self, x, t: float = 0.0) -> Primitive:
        rho, v, P, _ = self.fields(x, t)
        return Primitive(v=v, P=P, Y=np.ones(np.shape(rho) + (1,)), rho=rho)

    def source(self, x, t: float) -> np.ndarray:
        """
        Residual of the strong pressure-form equations at the manufactured fields.

        d/dt f(theta) = -2 pi f' and d/dx f(theta) = 2 pi f'.
        """
        rho, v, P, (drho, dv, dP) = self.fields(x, t)
        k = 2.0 * np.pi
        d_rho_v = drho * v + rho * dv
        out = np.empty(np.shape(rho) + (SPECIES + 1,))
        out[..., MOMENTUM] = k * (-d_rho_v + drho * v**2 + 2.0 * rho * v * dv + dP)
        out[..., SECOND] = k * (-dP + dP * v + P * dv + (self.gamma - 1.0) * P * dv)
        out[..., SPECIES] = k / self.W * (-drho + d_rho_v)
        return out


def mms_source(x, t: float, solution: ManufacturedSolution | None = None) -> np.ndarray:
    return (solution or ManufacturedSolution()).source(x, t)


def _bubble(name: str, v0: float, **kwargs) -> CaseSpec:
    with_o2 = kwargs.pop("with_o2", False)
    species = ("N2", "NC12H26", "O2") if with_o2 else ("N2", "NC12H26")
    return CaseSpec(
        name=name,
        species=species,
        thermo_source="thermo.dat",
        initial=lambda x: init_thermal_bubble(x, v0, extra_species=1 if with_o2 else 0),
        v0=v0,
        P0=BUBBLE_P,
        zero_species="O2" if with_o2 else None,
        refs=NormalizationRefs(1.0, 101325.0, 298.15),
        **kwargs,
    )


CASES: dict[str, CaseSpec] = {
    "gaussian": CaseSpec(
        name="gaussian",
        species=("FICT1", "FICT2"),
        thermo_source="gaussian_species.json",
        initial=init_gaussian_wave,
        R0=1.0,
        v0=5.0,
        P0=2.0,
        refs=NormalizationRefs(1.0, 1.0, 1.0),
        N=50, p=2, cfl=0.1, periods=1.0, samples_per_period=10,
        description="Two-species density wave, nondimensional",
    ),
    "bubble-600": _bubble(
        "bubble-600", 600.0, N=25, p=3, cfl=0.6, periods=100.0, samples_per_period=1,
        description="High-velocity N2 / n-dodecane thermal bubble",
    ),
    "bubble-1": _bubble(
        "bubble-1", 1.0, N=50, p=2, cfl=0.8, periods=10.0, samples_per_period=10,
        description="Low-velocity N2 / n-dodecane thermal bubble",
    ),
    "bubble-600-o2": _bubble(
        "bubble-600-o2", 600.0, with_o2=True, N=25, p=3, cfl=0.6, periods=100.0, samples_per_period=1,
        description="High-velocity bubble with an O2 slot at zero mass fraction",
    ),
    "mms": CaseSpec(
        name="mms",
        species=("IDEAL14",),
        thermo_source="ideal_species.json",
        initial=lambda x: ManufacturedSolution().primitive(x, 0.0),
        R0=1.0,
        P0=1.0,
        manufactured=ManufacturedSolution(),
        refs=NormalizationRefs(1.0, 1.0, 1.0),
        N=8, p=2, cfl=0.2, periods=1.0, samples_per_period=4,
        description="Manufactured solution with nonconstant velocity and pressure",
    ),
    "uniform-pressure-wave": CaseSpec(
        name="uniform-pressure-wave",
        species=("IDEAL14",),
        thermo_source="ideal_species.json",
        initial=init_uniform_pressure_wave,
        R0=1.0,
        v0=1.0,
        P0=1.0,
        refs=NormalizationRefs(1.0, 1.0, 1.0),
        N=16, p=3, cfl=0.3, periods=1.0, samples_per_period=4,
        description="Calorically perfect density wave at uniform pressure and velocity",
    ),
}


def get_case(name: str) -> CaseSpec:
    try:
        return CASES[name]
    except KeyError:
        raise UnknownCase(f"unknown case {name!r}", hint=f"Available cases: {', '.join(CASES)}.") from None


def wrap_coordinate(case: CaseSpec, x) -> np.ndarray:
    return case.x_left + np.mod(np.asarray(x, dtype=float) - case.x_left, case.length)


def exact_advected(case: CaseSpec, x, t: float) -> Primitive:
    """Initial condition shifted by v0 t on the periodic domain."""
    if case.v0 is None:
        raise CaseHasNoExact(f"case {case.name!r} is not a pure advection")
    return case.initial(wrap_coordinate(case, np.asarray(x, dtype=float) - case.v0 * t))


def exact_primitive(case: CaseSpec, x, t: float) -> Primitive:
    if case.manufactured is not None:
        return case.manufactured.primitive(x, t)
    return exact_advected(case, x, t)


def to_state(prim: Primitive, mixture: Mixture, formulation: str) -> np.ndarray:
    return primitive_to_state(prim.v, prim.P, prim.Y, mixture, formulation, rho=prim.rho, T=prim.T)


def initial_state(case: CaseSpec, x_nodes, mixture: Mixture, formulation: str) -> np.ndarray:
    """Nodal interpolation of the initial condition."""
    return to_state(case.initial(np.asarray(x_nodes, dtype=float)), mixture, formulation)


def exact_state_sampler(case: CaseSpec, mixture: Mixture, formulation: str, t: float):
    """Callable x -> exact state at time t, for normalized_l2_error."""
    if not case.has_exact:
        raise CaseHasNoExact(f"case {case.name!r} has no exact solution")
    return lambda x: to_state(exact_primitive(case, x, t), mixture, formulation)


def case_names() -> tuple[str, ...]:
    return tuple(CASES)
