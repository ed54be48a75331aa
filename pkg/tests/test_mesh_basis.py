"""Tests for the mesh, nodal basis, quadrature and element operators."""

import sys
sys.path.insert(0, "skills/dg-multicomponent/scripts")

import numpy as np
import pytest

from errors import DiscretizationError, UnsupportedDegree
from mesh_basis import (
    Mesh1D,
    build_discretization,
    element_average,
    gauss_lobatto,
    integrate_global,
    l2_project,
)


class TestQuadrature:
    def test_three_point_lobatto(self):
        nodes, weights = gauss_lobatto(3)
        assert nodes == pytest.approx([-1.0, 0.0, 1.0])
        assert weights == pytest.approx([1 / 3, 4 / 3, 1 / 3])

    @pytest.mark.parametrize("n", [2, 4, 7])
    def test_weights_sum_to_two(self, n):
        _, weights = gauss_lobatto(n)
        assert weights.sum() == pytest.approx(2.0)

    def test_lobatto_exact_to_degree_2n_minus_3(self):
        nodes, weights = gauss_lobatto(4)
        assert weights @ nodes**4 == pytest.approx(2.0 / 5.0)


class TestMesh:
    def test_spacing_and_coordinates(self):
        mesh = Mesh1D(4)
        assert mesh.h == 0.25
        x = mesh.map_to_physical(np.array([-1.0, 1.0]))
        assert x[0].tolist() == [-0.5, -0.25]
        assert x[-1, -1] == pytest.approx(0.5)

    def test_needs_two_elements(self):
        with pytest.raises(DiscretizationError):
            Mesh1D(1)

    def test_bad_interval(self):
        with pytest.raises(DiscretizationError):
            Mesh1D(4, x_left=1.0, x_right=0.0)


class TestBuildDiscretization:
    @pytest.mark.parametrize("p", [0, 7])
    def test_unsupported_degree(self, p):
        with pytest.raises(UnsupportedDegree):
            build_discretization(4, p)

    def test_unknown_mode(self):
        with pytest.raises(DiscretizationError):
            build_discretization(4, 2, "spectral")

    @pytest.mark.parametrize("mode", ["colocated", "overintegrated"])
    def test_mass_matrix_integrates_one(self, mode):
        disc = build_discretization(5, 3, mode)
        assert disc.ops.M.sum() == pytest.approx(disc.mesh.h)
        assert np.allclose(disc.ops.M @ disc.ops.M_inv, np.eye(4))

    def test_colocated_is_diagonal(self):
        ops = build_discretization(5, 3, "colocated").ops
        assert np.count_nonzero(ops.M - np.diag(np.diag(ops.M))) == 0
        assert np.array_equal(ops.Vq, np.eye(4))
        assert ops.n_q == 4

    def test_overintegrated_uses_p_plus_two_points(self):
        ops = build_discretization(5, 3, "overintegrated").ops
        assert ops.n_q == 5
        assert np.allclose(ops.M, ops.M.T)
        assert np.all(np.linalg.eigvalsh(ops.M) > 0)

    @pytest.mark.parametrize("mode", ["colocated", "overintegrated"])
    def test_summation_by_parts(self, mode):
        p = 3
        ops = build_discretization(6, p, mode).ops
        boundary = np.zeros((p + 1, p + 1))
        boundary[0, 0], boundary[p, p] = -1.0, 1.0
        assert np.allclose(ops.S + ops.S.T, boundary, atol=1e-12)

    def test_derivative_of_linear_field(self):
        disc = build_discretization(4, 3)
        x = disc.node_coordinates()
        assert np.allclose(disc.gradient_at_quadrature(x), 1.0)

    def test_node_coordinates_shape(self):
        disc = build_discretization(4, 2, x_left=0.0, x_right=2.0)
        x = disc.node_coordinates()
        assert x.shape == (4, 3)
        assert x[0, 0] == 0.0
        assert x[1, 0] == pytest.approx(x[0, -1])


class TestProjection:
    def test_reproduces_polynomials(self):
        disc = build_discretization(4, 2)
        f = lambda x: 3 * x**2 - x + 1
        coeffs = l2_project(f(disc.quadrature_coordinates())[..., None], disc.ops)
        assert np.allclose(coeffs[..., 0], f(disc.node_coordinates()))

    def test_scalar_field_on_one_element(self):
        disc = build_discretization(4, 3)
        values = np.full(disc.ops.n_q, 2.5)
        assert np.allclose(l2_project(values, disc.ops), 2.5)

    def test_integrate_global(self):
        disc = build_discretization(8, 2, "colocated", x_left=-1.0, x_right=3.0)
        ones = np.ones((8, disc.ops.n_q))
        assert integrate_global(ones, disc.ops) == pytest.approx(4.0)
        x = disc.quadrature_coordinates()
        assert integrate_global(x, disc.ops) == pytest.approx(4.0)

    def test_element_average_is_nodal_mean(self):
        U = np.array([[[1.0], [2.0], [6.0]]])
        assert element_average(U, axis=-2).tolist() == [[3.0]]
