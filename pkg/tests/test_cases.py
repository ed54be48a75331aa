"""Tests for the test-case library."""

import sys
sys.path.insert(0, "skills/dg-multicomponent/scripts")

import numpy as np
import pytest

from cases import (
    BUBBLE_P,
    ManufacturedSolution,
    case_names,
    exact_advected,
    exact_primitive,
    exact_state_sampler,
    get_case,
    init_gaussian_wave,
    init_thermal_bubble,
    initial_state,
    mms_source,
    wrap_coordinate,
)
from errors import CaseHasNoExact, UnknownCase
from mesh_basis import build_discretization
from thermo import temperature_from_PC


class TestRegistry:
    def test_names(self):
        assert set(case_names()) == {
            "gaussian", "bubble-600", "bubble-1", "bubble-600-o2", "mms", "uniform-pressure-wave",
        }

    def test_unknown_case_lists_available(self):
        with pytest.raises(UnknownCase) as exc:
            get_case("sod")
        assert "bubble-600" in exc.value.hint

    @pytest.mark.parametrize("name,N,p,cfl", [
        ("gaussian", 50, 2, 0.1),
        ("bubble-600", 25, 3, 0.6),
        ("bubble-1", 50, 2, 0.8),
    ])
    def test_run_defaults(self, name, N, p, cfl):
        case = get_case(name)
        assert (case.N, case.p, case.cfl) == (N, p, cfl)

    def test_periods(self):
        assert get_case("gaussian").period == pytest.approx(0.2)
        assert get_case("bubble-600").period == pytest.approx(1.0 / 600.0)
        assert get_case("bubble-1").period == pytest.approx(1.0)
        assert get_case("mms").period == 1.0


class TestInitialConditions:
    def test_gaussian_profile(self):
        prim = init_gaussian_wave(np.array([0.0, 0.25, -0.25]))
        assert prim.rho.tolist() == pytest.approx([5.0, 4.0 + np.exp(-31.25), 4.0 + np.exp(-31.25)])
        assert prim.Y[:, 0].tolist() == pytest.approx([0.5, 1.0, 0.0])
        assert np.all(prim.v == 5.0) and np.all(prim.P == 2.0)

    def test_bubble_profile(self):
        prim = init_thermal_bubble(np.array([0.0, 0.5]))
        # fuel-rich and cold in the middle, nitrogen and hot at the edge
        assert prim.Y[0, 1] > 0.99
        assert prim.Y[1, 0] > 0.99
        assert prim.T[0] == pytest.approx(363.0, abs=0.1)
        assert prim.T[1] == pytest.approx(900.0, abs=0.1)
        assert np.all(prim.P == BUBBLE_P)
        assert np.allclose(prim.Y.sum(axis=-1), 1.0)

    def test_bubble_extra_species_is_zero(self):
        prim = init_thermal_bubble(np.linspace(-0.5, 0.5, 7), extra_species=1)
        assert prim.Y.shape == (7, 3)
        assert not prim.Y[:, 2].any()

    def test_bubble_state_recovers_temperature(self):
        case = get_case("bubble-600")
        mixture = case.mixture()
        x = np.linspace(-0.5, 0.5, 11)
        U = initial_state(case, x, mixture, "pressure")
        T = temperature_from_PC(U[:, 1], U[:, 2:], mixture.R0)
        assert T == pytest.approx(case.initial(x).T, rel=1e-12)


class TestExactSolutions:
    def test_wrap_coordinate(self):
        case = get_case("gaussian")
        assert wrap_coordinate(case, np.array([0.6, -0.7, 0.1])).tolist() == pytest.approx([-0.4, 0.3, 0.1])

    def test_one_period_returns_initial(self):
        case = get_case("gaussian")
        x = np.linspace(-0.45, 0.45, 10)
        shifted = exact_advected(case, x, case.period)
        assert shifted.rho == pytest.approx(case.initial(x).rho, abs=1e-12)

    def test_mms_has_no_advected_solution(self):
        with pytest.raises(CaseHasNoExact):
            exact_advected(get_case("mms"), np.zeros(1), 0.1)

    def test_mms_exact_is_manufactured(self):
        case = get_case("mms")
        prim = exact_primitive(case, np.array([0.25]), 0.0)
        assert prim.rho[0] == pytest.approx(1.2)
        assert prim.v[0] == pytest.approx(1.1)
        assert prim.P[0] == pytest.approx(1.0)

    def test_sampler_shapes(self):
        case = get_case("gaussian")
        mixture = case.mixture()
        disc = build_discretization(4, 2)
        sample = exact_state_sampler(case, mixture, "energy", 0.05)
        assert sample(disc.quadrature_coordinates()).shape == (4, disc.ops.n_q, 4)


class TestManufacturedSource:
    def test_source_vanishes_for_steady_fields(self):
        steady = ManufacturedSolution(a_rho=0.0, a_v=0.0, a_P=0.0)
        assert not np.any(steady.source(np.linspace(0, 1, 5), 0.3))

    def test_pure_density_wave_needs_no_source(self):
        # rho advected at v = 1 with constant P is an exact solution
        wave = ManufacturedSolution(a_v=0.0, a_P=0.0)
        S = wave.source(np.linspace(0, 1, 9), 0.1)
        assert np.abs(S).max() < 1e-12

    def test_source_by_finite_differences(self):
        sol = ManufacturedSolution()
        x, t, h = np.linspace(0.0, 1.0, 7), 0.2, 1e-5
        rho, v, P, _ = sol.fields(x, t)

        def ddt(f):
            return (f(x, t + h) - f(x, t - h)) / (2 * h)

        def ddx(f):
            return (f(x + h, t) - f(x - h, t)) / (2 * h)

        def rv(xx, tt):
            r, vv, _, _ = sol.fields(xx, tt)
            return r * vv

        def mom_flux(xx, tt):
            r, vv, pp, _ = sol.fields(xx, tt)
            return r * vv**2 + pp

        def pres(xx, tt):
            return sol.fields(xx, tt)[2]

        def vel(xx, tt):
            return sol.fields(xx, tt)[1]

        def dens(xx, tt):
            return sol.fields(xx, tt)[0]

        S = mms_source(x, t, sol)
        assert S[:, 0] == pytest.approx(ddt(rv) + ddx(mom_flux), abs=1e-6)
        assert S[:, 1] == pytest.approx(ddt(pres) + v * ddx(pres) + sol.gamma * P * ddx(vel), abs=1e-6)
        assert S[:, 2] == pytest.approx((ddt(dens) + ddx(rv)) / sol.W, abs=1e-6)
