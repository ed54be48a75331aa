"""
Thermally perfect gas thermodynamics on NASA-7 polynomials.

All evaluators are vectorized: temperatures have shape ``(...)`` and
concentrations ``(..., ns)``. States use the pressure-based ordering
``(rho*v, P, C_1..C_ns)`` or the energy-based ordering
``(rho*v, rho*e_t, C_1..C_ns)``.

Usage:
    from thermo import Mixture, total_energy_density, energy_derivative_w
    mix = Mixture((n2, c12h26))
    rho_et = total_energy_density(y, mix)
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from errors import NoConvergence, TemperatureOutOfRange, ThermoError, VacuumState

log = logging.getLogger(__name__)

R_UNIVERSAL = 8.314462618  # J/(mol K)
T_REF = 298.15
DEFAULT_MARGIN = 0.1

# Slot layout shared by both formulations.
MOMENTUM = 0
SECOND = 1  # rho*e_t (energy form) or P (pressure form)
SPECIES = 2


@dataclass(frozen=True)
class ThermoInterval:
    """One NASA-7 polynomial: coeffs = (a0, a1, a2, a3, a4, b1, b2)."""

    T_low: float
    T_high: float
    coeffs: tuple[float, ...]


@dataclass(frozen=True)
class SpeciesThermo:
    name: str
    W: float
    intervals: tuple[ThermoInterval, ...]
    elements: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        if not self.W > 0:
            raise ThermoError(f"{self.name}: molar mass must be positive, got {self.W}")
        if not self.intervals:
            raise ThermoError(f"{self.name}: no temperature intervals")
        for iv in self.intervals:
            if len(iv.coeffs) != 7:
                raise ThermoError(f"{self.name}: expected 7 coefficients, got {len(iv.coeffs)}")
            if not iv.T_high > iv.T_low:
                raise ThermoError(f"{self.name}: empty interval [{iv.T_low}, {iv.T_high}]")
        for lo, hi in zip(self.intervals[:-1], self.intervals[1:]):
            if lo.T_high != hi.T_low:
                raise ThermoError(
                    f"{self.name}: intervals not contiguous at {lo.T_high} / {hi.T_low}"
                )

    @property
    def T_min(self) -> float:
        return self.intervals[0].T_low

    @property
    def T_max(self) -> float:
        return self.intervals[-1].T_high

    def coefficient_table(self) -> np.ndarray:
        return np.array([iv.coeffs for iv in self.intervals], dtype=float)

    def breakpoints(self) -> np.ndarray:
        return np.array([iv.T_high for iv in self.intervals[:-1]], dtype=float)

    def cv_positive(self, samples: int = 64) -> bool:
        """True if cp/R > 1 (cv > 0) at sampled temperatures of every interval."""
        for iv in self.intervals:
            T = np.linspace(iv.T_low, iv.T_high, samples)
            a = iv.coeffs
            cp_R = a[0] + T * (a[1] + T * (a[2] + T * (a[3] + T * a[4])))
            if not np.all(cp_R > 1.0):
                return False
        return True


def _check_range(T: np.ndarray, T_min: float, T_max: float, margin: float, label: str) -> None:
    lo, hi = T_min * (1.0 - margin), T_max * (1.0 + margin)
    if np.any(~np.isfinite(T)) or np.any(T < lo) or np.any(T > hi):
        T1 = np.atleast_1d(T)
        bad = T1[~((T1 >= lo) & (T1 <= hi))]
        raise TemperatureOutOfRange(
            f"{label}: temperature {float(bad.flat[0]):.6g} outside [{lo:.6g}, {hi:.6g}]"
        )
    outside = np.count_nonzero((T < T_min) | (T > T_max))
    if outside:
        log.warning("%s: %d temperature(s) extrapolated beyond [%g, %g]", label, outside, T_min, T_max)


def _cp_h_over_R(T: np.ndarray, s: SpeciesThermo) -> tuple[np.ndarray, np.ndarray]:
    """Dimensionless cp/R and molar h/R0 (units of K) for one species."""
    table = s.coefficient_table()
    idx = np.searchsorted(s.breakpoints(), T) if len(s.intervals) > 1 else np.zeros(T.shape, dtype=int)
    a = table[idx]
    a0, a1, a2, a3, a4, b1 = (a[..., k] for k in range(6))
    cp_R = a0 + T * (a1 + T * (a2 + T * (a3 + T * a4)))
    h_R = T * (a0 + T * (a1 / 2.0 + T * (a2 / 3.0 + T * (a3 / 4.0 + T * a4 / 5.0)))) + b1
    return cp_R, h_R


def species_properties(
    T, s: SpeciesThermo, R0: float = R_UNIVERSAL, margin: float = DEFAULT_MARGIN
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Mass-specific cp, h and u of one species.

    Args:
        T: Temperature(s)
        s: Species record
        R0: Universal gas constant of the unit system in use
        margin: Fractional extrapolation allowed beyond the table range

    Returns:
        (cp, h, u) with u = h - (R0/W) T
    """
    T = np.asarray(T, dtype=float)
    _check_range(T, s.T_min, s.T_max, margin, s.name)
    cp_R, h_R = _cp_h_over_R(T, s)
    R = R0 / s.W
    return cp_R * R, h_R * R, (h_R - T) * R


@dataclass(frozen=True)
class Mixture:
    """Species records plus the unit system they are evaluated in."""

    species: tuple[SpeciesThermo, ...]
    R0: float = R_UNIVERSAL
    margin: float = DEFAULT_MARGIN
    newton_tol: float = 1e-10
    max_iter: int = 50
    W: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "species", tuple(self.species))
        object.__setattr__(self, "W", np.array([s.W for s in self.species], dtype=float))

    @property
    def ns(self) -> int:
        return len(self.species)

    @property
    def names(self) -> list[str]:
        return [s.name for s in self.species]

    def index(self, name: str) -> int:
        return self.names.index(name)

    @property
    def T_bounds(self) -> tuple[float, float]:
        """Temperature range covered by every species."""
        return max(s.T_min for s in self.species), min(s.T_max for s in self.species)

    @property
    def T_limits(self) -> tuple[float, float]:
        """Hard limits: the common range widened by the extrapolation margin."""
        lo, hi = self.T_bounds
        return lo * (1.0 - self.margin), hi * (1.0 + self.margin)

    def check_temperature(self, T: np.ndarray) -> None:
        lo, hi = self.T_bounds
        _check_range(np.asarray(T, dtype=float), lo, hi, self.margin, "mixture")

    def molar_cp_h(self, T, check: bool = True) -> tuple[np.ndarray, np.ndarray]:
        """Molar cp_i and h_i stacked on a trailing species axis."""
        T = np.asarray(T, dtype=float)
        if check:
            self.check_temperature(T)
        pairs = [_cp_h_over_R(T, s) for s in self.species]
        cp = np.stack([p[0] for p in pairs], axis=-1) * self.R0
        h = np.stack([p[1] for p in pairs], axis=-1) * self.R0
        return cp, h

    def molar_u(self, T, check: bool = True) -> np.ndarray:
        T = np.asarray(T, dtype=float)
        _, h = self.molar_cp_h(T, check)
        return h - self.R0 * T[..., None]

    def density(self, C) -> np.ndarray:
        return np.asarray(C, dtype=float) @ self.W


@dataclass
class MixtureProperties:
    rho: np.ndarray
    R: np.ndarray
    cp: np.ndarray
    cv: np.ndarray
    gamma: np.ndarray
    P: np.ndarray
    c: np.ndarray


def require_positive(rho: np.ndarray, sum_C: np.ndarray) -> None:
    if np.any(~(rho > 0)) or np.any(~(sum_C > 0)):
        raise VacuumState("non-positive density or total concentration")


def mixture_properties(T, C, mixture: Mixture, P=None) -> MixtureProperties:
    """R, cv, cp, gamma and sound speed of a mixture at (T, C)."""
    T = np.asarray(T, dtype=float)
    C = np.asarray(C, dtype=float)
    rho = mixture.density(C)
    sum_C = C.sum(axis=-1)
    require_positive(rho, sum_C)
    cp_i, _ = mixture.molar_cp_h(T)
    rho_cp = (C * cp_i).sum(axis=-1)
    rho_cv = rho_cp - mixture.R0 * sum_C
    P = pressure_from_TC(T, C, mixture.R0) if P is None else np.asarray(P, dtype=float)
    gamma = rho_cp / rho_cv
    return MixtureProperties(
        rho=rho,
        R=mixture.R0 * sum_C / rho,
        cp=rho_cp / rho,
        cv=rho_cv / rho,
        gamma=gamma,
        P=P,
        c=np.sqrt(gamma * P / rho),
    )


def pressure_from_TC(T, C, R0: float = R_UNIVERSAL) -> np.ndarray:
    """Ideal-gas law P = R0 T sum(C)."""
    return R0 * np.asarray(T, dtype=float) * np.asarray(C, dtype=float).sum(axis=-1)


def temperature_from_PC(P, C, R0: float = R_UNIVERSAL) -> np.ndarray:
    """Closed-form inversion T = P / (R0 sum(C))."""
    sum_C = np.asarray(C, dtype=float).sum(axis=-1)
    if np.any(~(sum_C > 0)):
        raise VacuumState("total concentration must be positive to recover temperature")
    return np.asarray(P, dtype=float) / (R0 * sum_C)


def temperature_from_uC(u_target, C, mixture: Mixture, T_guess=None) -> np.ndarray:
    """
    Invert the mixture internal energy u(T) = sum(C_i u_i(T)) / rho.

    Safeguarded Newton on the common temperature range (cv > 0 makes u
    monotone), with a bracketed scalar fallback for points Newton leaves
    unconverged.

    Raises:
        TemperatureOutOfRange: u_target outside [u(T_lo), u(T_hi)]
        NoConvergence: neither Newton nor the bracketed solve met the tolerance
    """
    u_target = np.asarray(u_target, dtype=float)
    C = np.asarray(C, dtype=float)
    rho = mixture.density(C)
    require_positive(rho, C.sum(axis=-1))
    R0 = mixture.R0
    T_lo, T_hi = mixture.T_limits

    def u_of(T):
        return (C * mixture.molar_u(T, check=False)).sum(axis=-1) / rho

    def cv_of(T):
        cp, _ = mixture.molar_cp_h(T, check=False)
        return (C * (cp - R0)).sum(axis=-1) / rho

    u_lo = u_of(np.full(u_target.shape, T_lo))
    u_hi = u_of(np.full(u_target.shape, T_hi))
    if np.any(~np.isfinite(u_target)) or np.any(u_target < u_lo) or np.any(u_target > u_hi):
        raise TemperatureOutOfRange(
            f"internal energy outside the range reachable on [{T_lo:.6g}, {T_hi:.6g}] K"
        )

    if T_guess is None:
        T = T_lo + (u_target - u_lo) / (u_hi - u_lo) * (T_hi - T_lo)
    else:
        T = np.broadcast_to(np.asarray(T_guess, dtype=float), u_target.shape).copy()
    u_floor = cv_of(T) * T
    tol = mixture.newton_tol * np.maximum(np.abs(u_target), u_floor)

    done = np.zeros(u_target.shape, dtype=bool)
    for _ in range(mixture.max_iter):
        f = u_of(T) - u_target
        done = np.abs(f) <= tol
        if done.all():
            return T
        T = np.clip(T - f / cv_of(T), T_lo, T_hi)

    flat_T = np.atleast_1d(T).copy()
    flat_done = np.atleast_1d(np.abs(u_of(T) - u_target) <= tol)
    flat_u = np.atleast_1d(u_target)
    flat_C = C.reshape(-1, mixture.ns) if C.ndim > 1 else C[None, :]
    flat_tol = np.atleast_1d(tol)
    for k in np.flatnonzero(~flat_done):
        Ck, rk = flat_C[k], float(flat_C[k] @ mixture.W)

        def g(t, Ck=Ck, rk=rk, uk=flat_u[k]):
            return float(Ck @ mixture.molar_u(np.array(t), check=False)) / rk - uk

        try:
            root = brentq(g, T_lo, T_hi, xtol=1e-14 * T_hi, maxiter=200)
        except (ValueError, RuntimeError) as e:
            raise NoConvergence(f"temperature inversion failed at point {k}: {e}") from e
        if abs(g(root)) > flat_tol[k]:
            raise NoConvergence(f"temperature inversion stalled at point {k}, T={root:.6g}")
        flat_T[k] = root
    log.debug("temperature inversion used the bracketed fallback on %d point(s)", int((~flat_done).sum()))
    return flat_T.reshape(u_target.shape) if u_target.ndim else flat_T[0]


def _unpack_pressure_state(y: np.ndarray, mixture: Mixture):
    y = np.asarray(y, dtype=float)
    rho_v, P, C = y[..., MOMENTUM], y[..., SECOND], y[..., SPECIES:]
    rho = mixture.density(C)
    sum_C = C.sum(axis=-1)
    require_positive(rho, sum_C)
    return rho_v, P, C, rho, sum_C


def total_energy_density(y, mixture: Mixture) -> np.ndarray:
    """rho*e_t = rho*u(T(P, C), C) + (rho*v)^2 / (2 rho) for pressure-form states."""
    rho_v, P, C, rho, sum_C = _unpack_pressure_state(y, mixture)
    T = P / (mixture.R0 * sum_C)
    rho_u = (C * mixture.molar_u(T)).sum(axis=-1)
    return rho_u + 0.5 * rho_v**2 / rho


def energy_derivative_w(y, mixture: Mixture) -> np.ndarray:
    """
    Derivative of rho*e_t with respect to the pressure-form state.

    w = (v, rho*cv / (R0 sum C), W_i u_i - rho*cv P / (R0 (sum C)^2) - W_i |v|^2 / 2)
    """
    rho_v, P, C, rho, sum_C = _unpack_pressure_state(y, mixture)
    R0 = mixture.R0
    T = P / (R0 * sum_C)
    cp, h = mixture.molar_cp_h(T)
    u = h - R0 * T[..., None]
    rho_cv = (C * (cp - R0)).sum(axis=-1)
    v = rho_v / rho

    w = np.empty(np.shape(y), dtype=float)
    w[..., MOMENTUM] = v
    w[..., SECOND] = rho_cv / (R0 * sum_C)
    w[..., SPECIES:] = (
        u
        - (rho_cv * P / (R0 * sum_C**2))[..., None]
        - 0.5 * mixture.W * (v**2)[..., None]
    )
    return w


def correction_variables_z(y, w, mixture: Mixture) -> np.ndarray:
    """z = (v sum_i W_i w_Ci, P, w_C1..w_Cns)."""
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    z = np.array(w, copy=True)
    z[..., MOMENTUM] = w[..., MOMENTUM] * (w[..., SPECIES:] @ mixture.W)
    z[..., SECOND] = y[..., SECOND]
    return z


def energy_state_from_pressure(y, mixture: Mixture) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    out = np.array(y, copy=True)
    out[..., SECOND] = total_energy_density(y, mixture)
    return out


def energy_state_temperature(y, mixture: Mixture, T_guess=None) -> np.ndarray:
    """Temperature of energy-form states via the internal-energy inversion."""
    y = np.asarray(y, dtype=float)
    C = y[..., SPECIES:]
    rho = mixture.density(C)
    require_positive(rho, C.sum(axis=-1))
    rho_u = y[..., SECOND] - 0.5 * y[..., MOMENTUM] ** 2 / rho
    return temperature_from_uC(rho_u / rho, C, mixture, T_guess)


def pressure_state_from_energy(y, mixture: Mixture, T_guess=None) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    T = energy_state_temperature(y, mixture, T_guess)
    out = np.array(y, copy=True)
    out[..., SECOND] = pressure_from_TC(T, y[..., SPECIES:], mixture.R0)
    return out


def primitive_to_state(
    v,
    P,
    Y,
    mixture: Mixture,
    formulation: str = "pressure",
    rho=None,
    T=None,
) -> np.ndarray:
    """
    Build a state from velocity, pressure, mass fractions and either rho or T.

    Args:
        v, P: Velocity and pressure, shape (...)
        Y: Mass fractions, shape (..., ns)
        rho: Mixture density (takes precedence over T)
        T: Temperature, used when rho is not given
    """
    v = np.asarray(v, dtype=float)
    P = np.asarray(P, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if rho is None:
        if T is None:
            raise ThermoError("either rho or T is required to build a state")
        W_mix = 1.0 / (Y / mixture.W).sum(axis=-1)
        rho = P * W_mix / (mixture.R0 * np.asarray(T, dtype=float))
    rho = np.asarray(rho, dtype=float)
    C = rho[..., None] * Y / mixture.W
    shape = np.broadcast_shapes(v.shape, P.shape, rho.shape)
    y = np.empty(shape + (2 + mixture.ns,), dtype=float)
    y[..., MOMENTUM] = rho * v
    y[..., SECOND] = P
    y[..., SPECIES:] = np.broadcast_to(C, shape + (mixture.ns,))
    if formulation == "energy":
        return energy_state_from_pressure(y, mixture)
    return y
