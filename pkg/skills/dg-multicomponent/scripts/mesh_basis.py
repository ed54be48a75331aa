"""
Periodic 1D mesh, Gauss-Lobatto nodal basis, quadrature and element operators.

The reference element is [-1, 1] with an affine map; the Jacobian h/2 is
folded into the quadrature weights and the derivative matrix carries 2/h,
so every operator here acts on physical elements.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.polynomial import legendre as leg
from scipy.linalg import cho_factor, cho_solve

from errors import DiscretizationError, UnsupportedDegree

MODES = ("colocated", "overintegrated")
P_MAX = 6


def gauss_lobatto(n_points: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Lobatto-Legendre points and weights on [-1, 1]."""
    p = n_points - 1
    interior = leg.Legendre.basis(p).deriv().roots() if p > 1 else np.array([])
    nodes = np.concatenate(([-1.0], np.sort(np.real(interior)), [1.0]))
    weights = 2.0 / (p * (p + 1) * leg.legval(nodes, np.eye(p + 1)[p]) ** 2)
    return nodes, weights


def gauss_legendre(n_points: int) -> tuple[np.ndarray, np.ndarray]:
    return leg.leggauss(n_points)


def _legendre_derivative_vander(xi: np.ndarray, p: int) -> np.ndarray:
    out = np.empty((len(xi), p + 1))
    for k in range(p + 1):
        out[:, k] = leg.legval(xi, leg.legder(np.eye(p + 1)[k]))
    return out


@dataclass(frozen=True)
class Mesh1D:
    N: int
    x_left: float = -0.5
    x_right: float = 0.5
    periodic: bool = True

    def __post_init__(self):
        if self.N < 2:
            raise DiscretizationError(f"mesh needs at least 2 elements, got {self.N}")
        if not self.x_right > self.x_left:
            raise DiscretizationError("x_right must exceed x_left")

    @property
    def h(self) -> float:
        return (self.x_right - self.x_left) / self.N

    @property
    def length(self) -> float:
        return self.x_right - self.x_left

    def map_to_physical(self, xi: np.ndarray) -> np.ndarray:
        """Physical coordinates (N, len(xi)) of reference points in every element."""
        k = np.arange(self.N)[:, None]
        return self.x_left + self.h * (k + 0.5 * (np.asarray(xi)[None, :] + 1.0))


@dataclass(frozen=True)
class Basis:
    """Lagrange basis on Gauss-Lobatto nodes."""

    p: int
    nodes: np.ndarray

    @property
    def n_b(self) -> int:
        return self.p + 1

    def _modal(self) -> np.ndarray:
        return np.linalg.inv(leg.legvander(self.nodes, self.p))

    def evaluate(self, xi) -> np.ndarray:
        """phi_j(xi_q) as an (n_points, n_b) matrix."""
        return leg.legvander(np.atleast_1d(xi), self.p) @ self._modal()

    def derivative(self, xi) -> np.ndarray:
        """d phi_j / d xi at xi_q, on the reference element."""
        return _legendre_derivative_vander(np.atleast_1d(xi), self.p) @ self._modal()


@dataclass(frozen=True)
class Operators:
    M: np.ndarray
    M_inv: np.ndarray
    S: np.ndarray
    Vq: np.ndarray
    Dq: np.ndarray
    Wq: np.ndarray
    Vf: np.ndarray
    xi_q: np.ndarray
    projector: np.ndarray
    mode: str

    @property
    def n_q(self) -> int:
        return len(self.Wq)


class Discretization(NamedTuple):
    mesh: Mesh1D
    basis: Basis
    ops: Operators

    def node_coordinates(self) -> np.ndarray:
        return self.mesh.map_to_physical(self.basis.nodes)

    def quadrature_coordinates(self) -> np.ndarray:
        return self.mesh.map_to_physical(self.ops.xi_q)

    def to_quadrature(self, U: np.ndarray) -> np.ndarray:
        """Interpolate nodal coefficients (N, n_b, m) to quadrature points (N, n_q, m)."""
        return np.einsum("qb,eb...->eq...", self.ops.Vq, U)

    def gradient_at_quadrature(self, U: np.ndarray) -> np.ndarray:
        return np.einsum("qb,eb...->eq...", self.ops.Dq, U)


def build_discretization(
    N: int,
    p: int,
    mode: str = "overintegrated",
    x_left: float = -0.5,
    x_right: float = 0.5,
) -> Discretization:
    """
    Build mesh, basis and operators.

    Colocated mode integrates on the p+1 Gauss-Lobatto nodes (diagonal mass
    matrix); overintegrated mode uses p+2 Gauss-Legendre points and the exact
    dense mass matrix.
    """
    if not isinstance(p, (int, np.integer)) or not 1 <= p <= P_MAX:
        raise UnsupportedDegree(f"polynomial degree {p} not supported")
    if mode not in MODES:
        raise DiscretizationError(f"unknown integration mode {mode!r}", hint=f"Use one of {MODES}.")
    mesh = Mesh1D(N, x_left, x_right)
    nodes, gll_weights = gauss_lobatto(p + 1)
    basis = Basis(p, nodes)
    h = mesh.h

    if mode == "colocated":
        xi_q, w_ref = nodes, gll_weights
        Vq = np.eye(p + 1)
    else:
        xi_q, w_ref = gauss_legendre(p + 2)
        Vq = basis.evaluate(xi_q)
    Dq = basis.derivative(xi_q) * (2.0 / h)
    Wq = w_ref * (h / 2.0)

    M = Vq.T @ (Wq[:, None] * Vq)
    factor = cho_factor(M)
    M_inv = cho_solve(factor, np.eye(p + 1))
    if mode == "colocated":
        M = np.diag(np.diag(M))
        M_inv = np.diag(1.0 / np.diag(M))
    S = Dq.T @ (Wq[:, None] * Vq)
    Vf = np.eye(p + 1)[[0, p]]
    projector = M_inv @ (Vq.T * Wq)

    ops = Operators(
        M=M, M_inv=M_inv, S=S, Vq=Vq, Dq=Dq, Wq=Wq, Vf=Vf,
        xi_q=np.asarray(xi_q), projector=projector, mode=mode,
    )
    return Discretization(mesh, basis, ops)


def l2_project(values_at_quadrature: np.ndarray, ops: Operators) -> np.ndarray:
    """
    Coefficients M^-1 Vq^T W v of quadrature data.

    Shapes: (n_q,) for one scalar field, otherwise (..., n_q, m) with the
    quadrature axis second to last.
    """
    values = np.asarray(values_at_quadrature, dtype=float)
    if values.ndim == 1:
        return ops.projector @ values
    return np.einsum("bq,...qm->...bm", ops.projector, values)


def integrate_global(values_at_quadrature: np.ndarray, ops: Operators) -> float | np.ndarray:
    """Sum over elements and quadrature points of w_q f(x_q); values have shape (N, n_q, ...)."""
    values = np.asarray(values_at_quadrature, dtype=float)
    weights = ops.Wq.reshape((1, -1) + (1,) * (values.ndim - 2))
    return np.sum(values * weights, axis=(0, 1))


def element_average(coefficients: np.ndarray, axis: int = 0) -> np.ndarray:
    """Arithmetic mean of the nodal coefficients (not the integral average)."""
    return np.mean(coefficients, axis=axis)
