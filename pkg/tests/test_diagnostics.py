"""Tests for solution diagnostics."""

import sys
sys.path.insert(0, "skills/dg-multicomponent/scripts")

import numpy as np
import pytest

from cases import exact_state_sampler, get_case, initial_state
from dg_residual import GlobalSolution
from diagnostics import (
    CSV_FIELDS,
    DiagnosticsRecord,
    NormalizationRefs,
    convergence_rates,
    energy_conservation_error_percent,
    global_energy,
    global_energy_rate,
    max_abs_mass_fraction,
    normalized_l2_error,
    pressure_error_percent,
    relative_change_percent,
    velocity_deviation,
)
from errors import ConfigError, NonPositiveError
from mesh_basis import build_discretization
from solver import Simulation


@pytest.fixture(scope="module")
def wave():
    case = get_case("uniform-pressure-wave")
    mixture = case.mixture()
    disc = build_discretization(16, 3)
    U = initial_state(case, disc.node_coordinates(), mixture, "pressure")
    return case, mixture, disc, GlobalSolution(U, "pressure")


class TestNormalizationRefs:
    def test_defaults(self):
        refs = NormalizationRefs()
        assert (refs.rho_r, refs.P_r, refs.T_r) == (1.0, 101325.0, 298.15)

    def test_rejects_nonpositive(self):
        with pytest.raises(ConfigError, match="refs.P_r"):
            NormalizationRefs(P_r=0.0)

    def test_state_scales(self, wave):
        _, mixture, _, _ = wave
        s = NormalizationRefs(4.0, 1.0, 2.0).state_scales(mixture)
        assert s.tolist() == [0.5, 1.0, 2.0]


class TestPressureAndEnergy:
    def test_uniform_pressure_has_zero_error(self, wave):
        _, mixture, disc, sol = wave
        assert pressure_error_percent(sol, disc, mixture, 1.0) == pytest.approx(0.0, abs=1e-12)

    def test_pressure_error_scales(self, wave):
        _, mixture, disc, sol = wave
        assert pressure_error_percent(sol, disc, mixture, 0.5) == pytest.approx(100.0)

    def test_nonpositive_reference(self, wave):
        _, mixture, disc, sol = wave
        with pytest.raises(ConfigError):
            pressure_error_percent(sol, disc, mixture, 0.0)

    def test_global_energy(self, wave):
        _, mixture, disc, sol = wave
        # rho e_t = P / (gamma - 1) + rho v^2 / 2 with mean rho = 1 over the unit domain
        assert global_energy(sol, disc, mixture) == pytest.approx(2.5 + 0.5, rel=1e-10)

    def test_same_energy_in_both_formulations(self, wave):
        case, mixture, disc, sol = wave
        U_e = initial_state(case, disc.node_coordinates(), mixture, "energy")
        e_form = global_energy(GlobalSolution(U_e, "energy"), disc, mixture)
        assert e_form == pytest.approx(global_energy(sol, disc, mixture), rel=1e-3)

    def test_conservation_error_zero_against_itself(self, wave):
        _, mixture, disc, sol = wave
        assert energy_conservation_error_percent(sol, sol, disc, mixture) == 0.0

    def test_relative_change(self):
        assert relative_change_percent(101.0, 100.0) == pytest.approx(1.0)
        assert relative_change_percent(-99.0, -100.0) == pytest.approx(1.0)


class TestL2AndRates:
    def test_exact_solution_has_small_error(self, wave):
        case, mixture, disc, sol = wave
        errors = normalized_l2_error(sol, disc, exact_state_sampler(case, mixture, "pressure", 0.0), case.refs, mixture)
        assert errors.per_component.shape == (3,)
        assert errors.combined < 1e-3
        assert errors.combined == pytest.approx(np.sqrt(np.sum(errors.per_component**2)))

    def test_as_dict(self):
        from diagnostics import L2Errors
        d = L2Errors(np.array([3.0, 4.0]), 5.0).as_dict(["a", "b"])
        assert d == {"l2_a": 3.0, "l2_b": 4.0, "l2_combined": 5.0}

    def test_convergence_rates(self):
        rates = convergence_rates([1e-2, 1.25e-3, 1.5625e-4], [0.1, 0.05, 0.025])
        assert rates == pytest.approx([3.0, 3.0])

    @pytest.mark.parametrize("errors,sizes", [([1.0, 0.0], [0.1, 0.05]), ([1.0], [0.1]), ([1.0, 0.5], [0.1])])
    def test_convergence_rates_rejects(self, errors, sizes):
        with pytest.raises(NonPositiveError):
            convergence_rates(errors, sizes)


class TestEquilibriumChecks:
    def test_velocity_deviation(self, wave):
        _, mixture, _, sol = wave
        assert velocity_deviation(sol, mixture, 1.0) == pytest.approx(0.0, abs=1e-14)
        assert velocity_deviation(sol, mixture, 2.0) == pytest.approx(0.5)

    def test_zero_species_mass_fraction(self):
        sim = Simulation.build("bubble-600-o2", "P3", 4, 2)
        sol = sim.initial_solution()
        assert max_abs_mass_fraction(sol, sim.mixture, "O2") == 0.0
        assert max_abs_mass_fraction(sol, sim.mixture, "N2") > 0.5

    def test_energy_rate_matches_in_both_formulations(self):
        for scheme in ("P1", "E1"):
            sim = Simulation.build("uniform-pressure-wave", scheme, 8, 2)
            sol = sim.initial_solution()
            rate = global_energy_rate(sol, sim.rhs(sol.U, 0.0), sim.disc, sim.mixture)
            # periodic uniform-velocity flow: total energy is steady
            assert abs(rate) <= 1e-8 * global_energy(sol, sim.disc, sim.mixture)


class TestDiagnosticsRecord:
    def test_conservation_relative_to_first_sample(self):
        record = DiagnosticsRecord()
        record.append(0.0, 0.0, 100.0)
        record.append(1.0, 0.5, 101.0)
        assert len(record) == 2
        assert record.conservation_error_pct == [0.0, pytest.approx(1.0)]
        assert record.max_pressure_error == 0.5
        assert record.final_conservation_error == pytest.approx(1.0)

    def test_rows_follow_csv_fields(self):
        record = DiagnosticsRecord()
        record.append(0.0, 0.1, 3.0)
        assert list(record.rows()[0]) == list(CSV_FIELDS)

    def test_empty_record(self):
        record = DiagnosticsRecord()
        assert record.max_pressure_error == 0.0
        assert record.final_conservation_error == 0.0
