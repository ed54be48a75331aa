"""
Exception hierarchy shared by the solver scripts.

Every error carries a ``hint`` so CLI entry points can return
``{"success": False, "error": str(e), "hint": e.hint}`` without
special-casing each failure.
"""


class DGError(Exception):
    """Base class for all solver errors."""

    default_hint = ""

    def __init__(self, message: str, hint: str | None = None):
        super().__init__(message)
        self.hint = hint if hint is not None else self.default_hint


# Thermodynamics

class ThermoError(DGError):
    default_hint = "Check the thermo data and the state passed in."


class TemperatureOutOfRange(ThermoError):
    default_hint = "The state left the thermo table range; reduce the time step or widen the table."


class VacuumState(ThermoError):
    default_hint = "Density or total concentration is not positive."


class NoConvergence(ThermoError):
    default_hint = "Temperature inversion did not converge; check the thermo table."


# Thermo file parsing

class ThermoParseError(DGError):
    default_hint = "Check the CHEMKIN fixed-column layout (80 columns, markers 1-4 in column 80)."


class MalformedRecord(ThermoParseError):
    pass


class BadNumber(ThermoParseError):
    default_hint = "Coefficient fields are 15 characters wide, e.g. ' 3.29867700E+00'."


class DuplicateSpecies(ThermoParseError):
    default_hint = "Each species may appear only once per thermo file."


class SpeciesNotFound(ThermoParseError):
    default_hint = "Use inspect mode on the thermo file to list available species."


class ThermoFileNotFound(ThermoParseError):
    default_hint = "Give a path to an existing file or the name of a file in the data directory."


# Discretization and formulation

class DiscretizationError(DGError):
    pass


class UnsupportedDegree(DiscretizationError):
    default_hint = "Polynomial degree must be between 1 and 6."


class FormulationError(DGError):
    pass


class EnergyFormUnsupported(FormulationError):
    default_hint = "Nonconservative terms exist only in the pressure-based formulation."


# Time integration

class SolutionDiverged(DGError):
    default_hint = "The solution diverged; this is an expected outcome for some scheme/case pairs."


class NonFiniteState(SolutionDiverged):
    pass


class NonPhysicalState(SolutionDiverged):
    pass


# Cases and configuration

class CaseError(DGError):
    pass


class UnknownCase(CaseError):
    default_hint = "Available cases: gaussian, bubble-600, bubble-1, bubble-600-o2, mms, uniform-pressure-wave."


class CaseHasNoExact(CaseError):
    default_hint = "Only advected cases and the manufactured solution have an exact solution."


class NonPositiveError(DGError):
    default_hint = "Convergence rates need strictly positive errors and sizes."


class ConfigError(DGError):
    """Configuration error naming the offending field path."""

    default_hint = "See REFERENCE.md for the run configuration schema."

    def __init__(self, field: str, message: str, hint: str | None = None):
        super().__init__(f"{field}: {message}", hint)
        self.field = field


# Errors that end a time integration as a recorded divergence.
DIVERGENCE_ERRORS = (ThermoError, SolutionDiverged)
