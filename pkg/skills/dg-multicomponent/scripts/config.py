"""
Run configuration with layered defaults.

Layers, later wins: built-in defaults, case defaults, JSON config file,
command-line flags. Keys are flat except ``refs`` and ``tolerances``.

Example config file:
    {
      "case": "bubble-600",
      "scheme": "P3",
      "N": 25, "p": 3, "cfl": 0.6, "periods": 100,
      "tolerances": {"alpha_tol": 1e-7, "beta_tol": 1e-6}
    }
"""

import json
import logging
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any

from cases import CaseSpec, get_case
from diagnostics import NormalizationRefs
from errors import CaseError, ConfigError
from mesh_basis import P_MAX
from time_integrator import STEPPERS

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SCHEME_NAMES = ("P1", "P2", "P3", "E1", "E2")
TOLERANCE_KEYS = ("alpha_tol", "beta_tol", "uniform_tol")


@dataclass(frozen=True)
class RunConfig:
    case: str = "gaussian"
    scheme: str = "P3"
    p: int = 3
    N: int = 25
    cfl: float | None = 0.6
    dt: float | None = None
    periods: float = 1.0
    t_end: float | None = None
    samples_per_period: int = 1
    out: str | None = None
    thermo: str | None = None
    stepper: str = "ssprk3"
    max_steps: int = 10_000_000
    refs: NormalizationRefs = field(default_factory=NormalizationRefs)
    tolerances: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        try:
            get_case(self.case)
        except CaseError as e:
            raise ConfigError("case", str(e), e.hint) from e
        if self.scheme not in SCHEME_NAMES:
            raise ConfigError("scheme", f"unknown scheme {self.scheme!r}", hint=f"Use one of {SCHEME_NAMES}.")
        if not isinstance(self.p, int) or not 1 <= self.p <= P_MAX:
            raise ConfigError("p", f"must be an integer in [1, {P_MAX}], got {self.p!r}")
        if not isinstance(self.N, int) or self.N < 2:
            raise ConfigError("N", f"must be an integer >= 2, got {self.N!r}")
        if self.dt is None:
            if self.cfl is None or not 0.0 < self.cfl <= 1.0:
                raise ConfigError("cfl", f"must lie in (0, 1], got {self.cfl!r}")
        elif not self.dt > 0:
            raise ConfigError("dt", f"must be positive, got {self.dt!r}")
        if self.t_end is None and not self.periods > 0:
            raise ConfigError("periods", "must be positive")
        if self.t_end is not None and not self.t_end > 0:
            raise ConfigError("t_end", "must be positive")
        if self.samples_per_period < 1:
            raise ConfigError("samples_per_period", "must be at least 1")
        if self.stepper not in STEPPERS:
            raise ConfigError("stepper", f"unknown stepper {self.stepper!r}", hint=f"Use one of {STEPPERS}.")
        for key, value in self.tolerances.items():
            if key not in TOLERANCE_KEYS:
                raise ConfigError(f"tolerances.{key}", "unknown tolerance", hint=f"Use one of {TOLERANCE_KEYS}.")
            if not value > 0:
                raise ConfigError(f"tolerances.{key}", "must be positive")

    @property
    def case_spec(self) -> CaseSpec:
        return get_case(self.case)

    @property
    def period(self) -> float:
        return self.case_spec.period

    @property
    def end_time(self) -> float:
        return self.t_end if self.t_end is not None else self.periods * self.period

    def sample_times(self) -> list[float]:
        step = self.period / self.samples_per_period
        n = int(round(self.end_time / step))
        times = [k * step for k in range(1, n + 1) if k * step < self.end_time * (1 - 1e-12)]
        return times + [self.end_time]

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def case_defaults(case: CaseSpec) -> dict[str, Any]:
    return {
        "case": case.name,
        "N": case.N,
        "p": case.p,
        "cfl": case.cfl,
        "periods": case.periods,
        "samples_per_period": case.samples_per_period,
        "refs": case.refs,
    }


def load_config_file(path: str) -> dict[str, Any]:
    """Read a JSON config; a leading @ is accepted."""
    p = Path(path[1:] if path.startswith("@") else path)
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError("config", f"file not found: {p}") from None
    except json.JSONDecodeError as e:
        raise ConfigError("config", f"invalid JSON in {p}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be a JSON object")
    return data


def _coerce_layer(layer: dict[str, Any], base: dict[str, Any]) -> dict[str, Any]:
    known = {f.name for f in fields(RunConfig)}
    out: dict[str, Any] = {}
    for key, value in layer.items():
        if value is None:
            continue
        if key not in known:
            raise ConfigError(key, "unknown field")
        if key == "refs":
            if isinstance(value, dict):
                current = base.get("refs", NormalizationRefs())
                try:
                    value = replace(current, **value)
                except TypeError as e:
                    raise ConfigError("refs", str(e)) from e
            elif not isinstance(value, NormalizationRefs):
                raise ConfigError("refs", "must be an object with rho_r, P_r, T_r")
        elif key == "tolerances":
            if not isinstance(value, dict):
                raise ConfigError("tolerances", "must be an object")
            value = {**base.get("tolerances", {}), **value}
        out[key] = value
    return out


def build_config(file_data: dict[str, Any] | None = None, overrides: dict[str, Any] | None = None) -> RunConfig:
    """
    Merge the configuration layers and validate.

    The case is resolved first (flags over file over default) so its
    defaults slot in below the file and the flags. Setting ``dt`` in a
    later layer turns off the CFL rule.
    """
    file_data = dict(file_data or {})
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    case_name = overrides.get("case") or file_data.get("case") or RunConfig.case
    try:
        case = get_case(case_name)
    except CaseError as e:
        raise ConfigError("case", str(e), e.hint) from e

    merged: dict[str, Any] = {}
    for layer in (case_defaults(case), file_data, overrides):
        coerced = _coerce_layer(layer, merged)
        if "dt" in coerced:
            merged["cfl"] = None
        if "cfl" in coerced and "dt" not in coerced:
            merged["dt"] = None
        merged.update(coerced)
    try:
        return RunConfig(**merged)
    except TypeError as e:
        raise ConfigError("config", str(e)) from e
