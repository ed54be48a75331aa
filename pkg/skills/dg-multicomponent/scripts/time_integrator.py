"""
Explicit time stepping: SSPRK3 (Shu-Osher form), Forward Euler and a
sampling run loop that records divergence instead of raising it.

``rhs(U, t)`` returns dU/dt = -M^-1 R for coefficient arrays of shape
(N, n_b, m).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from errors import DIVERGENCE_ERRORS, ConfigError, NonFiniteState
from mesh_basis import Discretization
from physics_flux import flow_state
from thermo import Mixture

log = logging.getLogger(__name__)

RhsFn = Callable[[np.ndarray, float], np.ndarray]

# Stage k: U_k = a_k U_0 + b_k (U_{k-1} + dt rhs(U_{k-1}, t + c_k dt))
SSPRK3_TABLEAU = (
    (0.0, 1.0, 0.0),
    (3.0 / 4.0, 1.0 / 4.0, 1.0),
    (1.0 / 3.0, 2.0 / 3.0, 0.5),
)
STEPPERS = ("ssprk3", "euler")


@dataclass(frozen=True)
class StepControl:
    t_end: float
    cfl: float | None = None
    dt_fixed: float | None = None
    max_steps: int = 10_000_000

    def __post_init__(self):
        if (self.cfl is None) == (self.dt_fixed is None):
            raise ConfigError("cfl", "exactly one of cfl and dt must be set")
        if self.cfl is not None and not 0.0 < self.cfl <= 1.0:
            raise ConfigError("cfl", f"must lie in (0, 1], got {self.cfl}")
        if self.dt_fixed is not None and not self.dt_fixed > 0:
            raise ConfigError("dt", f"must be positive, got {self.dt_fixed}")
        if not self.t_end > 0:
            raise ConfigError("t_end", "must be positive")
        if self.max_steps < 1:
            raise ConfigError("max_steps", "must be at least 1")


def max_wave_speed(U: np.ndarray, formulation: str, mixture: Mixture) -> float:
    s = flow_state(U, formulation, mixture)
    return float(np.max(np.abs(s.v) + s.c))


def stable_timestep(U: np.ndarray, disc: Discretization, formulation: str, mixture: Mixture, cfl: float) -> float:
    """dt = cfl h / ((2p + 1) max_nodes(|v| + c))."""
    speed = max_wave_speed(U, formulation, mixture)
    return cfl * disc.mesh.h / ((2 * disc.basis.p + 1) * speed)


def _check_finite(U: np.ndarray, stage: int) -> None:
    if not np.all(np.isfinite(U)):
        raise NonFiniteState(f"non-finite coefficients after stage {stage}")


def forward_euler_step(U: np.ndarray, t: float, dt: float, rhs: RhsFn) -> np.ndarray:
    U_new = U + dt * rhs(U, t)
    _check_finite(U_new, 1)
    return U_new


def ssprk3_step(U: np.ndarray, t: float, dt: float, rhs: RhsFn) -> np.ndarray:
    """Three Forward Euler stages combined convexly."""
    stage = U
    for k, (a, b, c) in enumerate(SSPRK3_TABLEAU, start=1):
        euler = stage + dt * rhs(stage, t + c * dt)
        stage = a * U + b * euler if k > 1 else euler
        _check_finite(stage, k)
    return stage


@dataclass
class AdvanceResult:
    U: np.ndarray
    t: float
    steps: int
    diverged: bool = False
    truncated: bool = False
    divergence_time: float | None = None
    reason: str = ""
    dt_history: list[float] = field(default_factory=list)

    @property
    def completed(self) -> bool:
        return not (self.diverged or self.truncated)


def advance(
    U0: np.ndarray,
    rhs: RhsFn,
    control: StepControl,
    dt_rule: Callable[[np.ndarray, float], float] | None = None,
    t0: float = 0.0,
    sample_times=(),
    sampler: Callable[[np.ndarray, float], None] | None = None,
    stepper: str = "ssprk3",
) -> AdvanceResult:
    """
    March from t0 to control.t_end.

    The step size comes from ``control.dt_fixed`` or from ``dt_rule`` every
    step, and is clipped so each sample time and t_end are hit exactly.
    ``sampler`` runs at every sample time after t0. Thermo failures and
    non-finite or non-physical states end the run as a recorded divergence.
    """
    if stepper not in STEPPERS:
        raise ConfigError("stepper", f"unknown stepper {stepper!r}", hint=f"Use one of {STEPPERS}.")
    if control.dt_fixed is None and dt_rule is None:
        raise ConfigError("cfl", "a CFL run needs a time-step rule")
    step = ssprk3_step if stepper == "ssprk3" else forward_euler_step
    targets = sorted(float(s) for s in sample_times if t0 < s <= control.t_end)
    if not targets or not math.isclose(targets[-1], control.t_end):
        targets.append(control.t_end)
    eps = 1e-12 * max(abs(control.t_end), 1.0)

    U, t, steps = U0, t0, 0
    result = AdvanceResult(U=U, t=t, steps=0)
    for target in targets:
        while t < target - eps:
            if steps >= control.max_steps:
                log.warning("stopping at max_steps=%d, t=%.6g", control.max_steps, t)
                result.U, result.t, result.steps = U, t, steps
                result.truncated = True
                return result
            try:
                dt = control.dt_fixed if control.dt_fixed is not None else dt_rule(U, t)
                dt = min(dt, target - t)
                U = step(U, t, dt, rhs)
            except DIVERGENCE_ERRORS as e:
                log.warning("solution diverged at t=%.6g after %d steps: %s", t, steps, e)
                result.U, result.t, result.steps = U, t, steps
                result.diverged, result.divergence_time, result.reason = True, t, str(e)
                return result
            t += dt
            steps += 1
            result.dt_history.append(dt)
        t = target
        if sampler is not None:
            try:
                sampler(U, t)
            except DIVERGENCE_ERRORS as e:
                log.warning("sampling failed at t=%.6g: %s", t, e)
                result.U, result.t, result.steps = U, t, steps
                result.diverged, result.divergence_time, result.reason = True, t, str(e)
                return result
    result.U, result.t, result.steps = U, t, steps
    return result
