"""Tests for physical fluxes, the Lax-Friedrichs flux and the face terms."""

import sys
sys.path.insert(0, "skills/dg-multicomponent/scripts")

import numpy as np
import pytest

from cases import get_case
from errors import EnergyFormUnsupported, FormulationError, NonPhysicalState
from physics_flux import (
    FaceTrace,
    corrected_interface_flux,
    energy_flux_from_state,
    energy_interface_flux,
    face_fluxes,
    flow_state,
    lax_friedrichs_flux,
    nonconservative_term,
    physical_flux,
    pressure_jump_term_DP,
    wave_speed_estimate,
)
from thermo import correction_variables_z, energy_derivative_w, primitive_to_state


@pytest.fixture(scope="module")
def ideal():
    return get_case("mms").mixture()


@pytest.fixture(scope="module")
def bubble():
    return get_case("bubble-600").mixture()


def with_w_z(trace, mixture):
    trace.w_plus = energy_derivative_w(trace.y_plus, mixture)
    trace.w_minus = energy_derivative_w(trace.y_minus, mixture)
    trace.z_plus = correction_variables_z(trace.y_plus, trace.w_plus, mixture)
    trace.z_minus = correction_variables_z(trace.y_minus, trace.w_minus, mixture)
    return trace


def bubble_face(mixture, P=(6e6, 5e6), v=(600.0, 550.0), T=(400.0, 800.0)):
    Y = np.array([[0.9, 0.1], [0.3, 0.7]])
    y = primitive_to_state(np.array(v), np.array(P), Y, mixture, T=np.array(T))
    return with_w_z(FaceTrace(y_plus=y[:1], y_minus=y[1:], n=1.0), mixture)


class TestFlowState:
    def test_pressure_form(self, ideal):
        s = flow_state(np.array([6.0, 5.0, 2.0]), "pressure", ideal)
        assert (s.rho, s.v, s.P, s.T) == (2.0, 3.0, 5.0, 2.5)
        assert s.gamma == pytest.approx(1.4)
        assert s.c == pytest.approx(np.sqrt(1.4 * 5.0 / 2.0))
        assert s.rho_et == pytest.approx(21.5)

    def test_energy_form(self, ideal):
        s = flow_state(np.array([6.0, 21.5, 2.0]), "energy", ideal)
        assert s.P == pytest.approx(5.0)
        assert s.T == pytest.approx(2.5)

    def test_negative_pressure(self, ideal):
        with pytest.raises(NonPhysicalState):
            flow_state(np.array([0.0, -1.0, 1.0]), "pressure", ideal)

    def test_unknown_formulation(self, ideal):
        with pytest.raises(FormulationError):
            flow_state(np.array([0.0, 1.0, 1.0]), "entropy", ideal)


class TestPhysicalFlux:
    def test_pressure_form(self, ideal):
        F = physical_flux(np.array([6.0, 5.0, 2.0]), "pressure", ideal)
        assert F.tolist() == pytest.approx([23.0, 15.0, 6.0])

    def test_energy_form(self, ideal):
        F = physical_flux(np.array([6.0, 21.5, 2.0]), "energy", ideal)
        assert F == pytest.approx([23.0, 3.0 * (21.5 + 5.0), 6.0])

    def test_energy_flux_same_in_both_forms(self, bubble):
        y = primitive_to_state(600.0, 6e6, np.array([0.5, 0.5]), bubble, T=500.0)
        e = primitive_to_state(600.0, 6e6, np.array([0.5, 0.5]), bubble, "energy", T=500.0)
        Fe_p = energy_flux_from_state(flow_state(y, "pressure", bubble))
        Fe_e = physical_flux(e, "energy", bubble)[1]
        assert Fe_p == pytest.approx(Fe_e, rel=1e-9)


class TestNonconservativeTerm:
    def test_energy_form_unsupported(self, ideal):
        with pytest.raises(EnergyFormUnsupported):
            nonconservative_term(np.array([6.0, 5.0, 2.0]), np.zeros(3), ideal, "energy")

    def test_zero_for_uniform_velocity(self, bubble):
        y = primitive_to_state(600.0, 6e6, np.array([0.5, 0.5]), bubble, T=500.0)
        dC = np.array([3.0, -1.0])
        dy = np.concatenate([[600.0 * (dC @ bubble.W)], [0.0], dC])
        assert nonconservative_term(y, dy, bubble)[1] == pytest.approx(0.0, abs=1e-6)

    def test_pressure_slot_only(self, ideal):
        out = nonconservative_term(np.array([6.0, 5.0, 2.0]), np.array([1.0, 0.0, 0.0]), ideal)
        # (gamma - 1) P dv/dx with dv/dx = d(rho v)/dx / rho
        assert out.tolist() == pytest.approx([0.0, 0.4 * 5.0 * 1.0 / 2.0, 0.0])


class TestLaxFriedrichs:
    def test_consistent(self, bubble):
        y = primitive_to_state(np.array([600.0]), np.array([6e6]), np.array([[0.5, 0.5]]), bubble, T=np.array([500.0]))
        F = physical_flux(y, "pressure", bubble)
        assert lax_friedrichs_flux(FaceTrace(y, y, 1.0), bubble) == pytest.approx(F)
        assert lax_friedrichs_flux(FaceTrace(y, y, -1.0), bubble) == pytest.approx(-F)

    def test_conservative(self, bubble):
        trace = bubble_face(bubble)
        assert lax_friedrichs_flux(trace, bubble) == pytest.approx(-lax_friedrichs_flux(trace.flipped(), bubble))

    def test_wave_speed(self, bubble):
        trace = bubble_face(bubble)
        sp = flow_state(trace.y_plus, "pressure", bubble)
        sm = flow_state(trace.y_minus, "pressure", bubble)
        expected = max(abs(sp.v[0]) + sp.c[0], abs(sm.v[0]) + sm.c[0])
        assert wave_speed_estimate(trace, bubble)[0] == pytest.approx(expected)
        assert face_fluxes(trace, bubble).lam[0] == pytest.approx(expected)


class TestPressureJumpTerm:
    def test_vanishes_at_equal_pressure_and_velocity(self, bubble):
        trace = bubble_face(bubble, P=(6e6, 6e6), v=(600.0, 600.0))
        D = pressure_jump_term_DP(trace, bubble)
        assert abs(D[0]) <= 1e-9 * 6e6 * 600.0

    def test_nonzero_across_velocity_jump(self, bubble):
        trace = bubble_face(bubble, P=(6e6, 6e6), v=(600.0, 500.0))
        assert abs(pressure_jump_term_DP(trace, bubble)[0]) > 1.0

    def test_same_value_from_both_sides(self, bubble):
        trace = bubble_face(bubble)
        assert pressure_jump_term_DP(trace.flipped(), bubble) == pytest.approx(pressure_jump_term_DP(trace, bubble))

    def test_energy_form_unsupported(self, bubble):
        trace = bubble_face(bubble)
        trace.formulation = "energy"
        with pytest.raises(EnergyFormUnsupported):
            pressure_jump_term_DP(trace, bubble)


class TestEnergyInterfaceFlux:
    def test_consistent_variants(self, bubble):
        y = primitive_to_state(np.array([600.0]), np.array([6e6]), np.array([[0.5, 0.5]]), bubble, T=np.array([500.0]))
        trace = with_w_z(FaceTrace(y, y.copy(), 1.0), bubble)
        Fe = energy_flux_from_state(flow_state(y, "pressure", bubble))
        assert energy_interface_flux(trace, bubble, "lf") == pytest.approx(Fe)
        assert energy_interface_flux(trace, bubble, "modified") == pytest.approx(Fe, rel=1e-9)

    def test_modified_needs_w(self, bubble):
        trace = bubble_face(bubble)
        trace.w_plus = None
        with pytest.raises(FormulationError):
            energy_interface_flux(trace, bubble, "modified")

    def test_unknown_variant(self, bubble):
        with pytest.raises(FormulationError):
            energy_interface_flux(bubble_face(bubble), bubble, "roe")


class TestCorrectedFlux:
    def test_energy_flux_identity(self, bubble):
        trace = bubble_face(bubble)
        flux, beta = corrected_interface_flux(trace, bubble, beta_tol=1e-300)
        assert beta[0] != 0.0
        ff = face_fluxes(trace, bubble)
        lhs = trace.w_plus[0] @ (flux[0] - ff.F_plus[0]) - trace.w_minus[0] @ (flux[0] - ff.F_minus[0])
        dFe = energy_flux_from_state(ff.plus)[0] - energy_flux_from_state(ff.minus)[0]
        scale = abs(trace.w_plus[0] @ flux[0]) + abs(trace.w_plus[0] @ ff.F_plus[0]) + abs(dFe)
        assert abs(lhs + dFe) <= 1e-10 * scale

    def test_beta_zeroed_below_tolerance(self, bubble):
        trace = bubble_face(bubble)
        flux, beta = corrected_interface_flux(trace, bubble, beta_tol=1e300)
        assert beta[0] == 0.0
        assert flux == pytest.approx(lax_friedrichs_flux(trace, bubble))

    def test_masked_slots_not_corrected(self, bubble):
        trace = bubble_face(bubble)
        mask = np.array([[False, False, False, True]])
        flux, beta = corrected_interface_flux(trace, bubble, beta_tol=1e-300, masked_slots=mask)
        lf = lax_friedrichs_flux(trace, bubble)
        assert flux[0, 3] == lf[0, 3]

    def test_needs_projected_traces(self, bubble):
        y = bubble_face(bubble)
        with pytest.raises(FormulationError):
            corrected_interface_flux(FaceTrace(y.y_plus, y.y_minus, 1.0), bubble)
