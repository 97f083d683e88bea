"""Bilinear quadrilateral finite elements for -div(K grad T) = Q with a full 2x2 tensor K.

Integrals use 2x2 Gauss quadrature. Tensor fields may be passed as a
constant ``(2, 2)`` array, one tensor per element ``(n_elems, 2, 2)``, one
per quadrature point ``(n_elems, 4, 2, 2)``, or a callable receiving the
quadrature point coordinates ``(n_elems, 4, 2)``.
"""
from __future__ import annotations

import weakref
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import AssemblyError, ConfigurationError, NumericalError
from .material import is_admissible

_G = 1.0 / np.sqrt(3.0)
GAUSS_POINTS = np.array([[-_G, -_G], [_G, -_G], [_G, _G], [-_G, _G]])
GAUSS_WEIGHTS = np.ones(4)
_CORNERS = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])


def shape_functions(xi, eta):
    """Values ``(..., 4)`` and reference gradients ``(..., 4, 2)`` of the bilinear basis."""
    xi = np.asarray(xi, dtype=float)[..., None]
    eta = np.asarray(eta, dtype=float)[..., None]
    a, b = _CORNERS[:, 0], _CORNERS[:, 1]
    n = 0.25 * (1 + a * xi) * (1 + b * eta)
    dn = np.stack([0.25 * a * (1 + b * eta), 0.25 * b * (1 + a * xi)], axis=-1)
    return n, dn


@dataclass(frozen=True)
class Geometry:
    N: np.ndarray       # (nq, 4) basis values at the quadrature points
    grad: np.ndarray    # (ne, nq, 4, 2) physical basis gradients
    wdet: np.ndarray    # (ne, nq) quadrature weight times Jacobian determinant
    points: np.ndarray  # (ne, nq, 2) physical quadrature points


_geometry_cache = weakref.WeakKeyDictionary()


def _jacobian_data(mesh, ref_points):
    N, dN = shape_functions(ref_points[:, 0], ref_points[:, 1])
    X = mesh.nodes[mesh.elements]                        # (ne, 4, 2)
    J = np.einsum("eai,qaj->eqij", X, dN)                # dx_i / dref_j
    det = J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] * J[..., 1, 0]
    if np.any(det <= 0):
        raise ConfigurationError("element with non-positive Jacobian (clockwise or degenerate ordering)")
    inv = np.empty_like(J)
    inv[..., 0, 0] = J[..., 1, 1] / det
    inv[..., 1, 1] = J[..., 0, 0] / det
    inv[..., 0, 1] = -J[..., 0, 1] / det
    inv[..., 1, 0] = -J[..., 1, 0] / det
    grad = np.einsum("qak,eqkj->eqaj", dN, inv)          # dN/dx_j = dN/dref_k * dref_k/dx_j
    points = np.einsum("qa,eai->eqi", N, X)
    return N, grad, det, points


def geometry(mesh):
    """Quadrature data for ``mesh``, cached per mesh object."""
    geo = _geometry_cache.get(mesh)
    if geo is None:
        N, grad, det, points = _jacobian_data(mesh, GAUSS_POINTS)
        geo = Geometry(N=N, grad=grad, wdet=det * GAUSS_WEIGHTS, points=points)
        _geometry_cache[mesh] = geo
    return geo


def center_gradients(mesh):
    """Physical basis gradients at element centers, shape ``(ne, 4, 2)``."""
    _, grad, _, _ = _jacobian_data(mesh, np.zeros((1, 2)))
    return grad[:, 0]


def interpolate(mesh, nodal):
    """Bilinear interpolant of a nodal field at the quadrature points, ``(ne, nq)``."""
    return np.einsum("qa,ea->eq", geometry(mesh).N, np.asarray(nodal, dtype=float)[mesh.elements])


def gradient(mesh, nodal):
    """Gradient of the interpolant at the quadrature points, ``(ne, nq, 2)``."""
    return np.einsum("eqai,ea->eqi", geometry(mesh).grad, np.asarray(nodal, dtype=float)[mesh.elements])


def tensor_field(mesh, tensor):
    """Normalize any accepted tensor description to shape ``(ne, nq, 2, 2)``."""
    geo = geometry(mesh)
    ne, nq = geo.wdet.shape
    if callable(tensor):
        k = np.asarray(tensor(geo.points), dtype=float)
    else:
        k = np.asarray(tensor, dtype=float)
    if k.shape == (2, 2):
        k = np.broadcast_to(k, (ne, nq, 2, 2))
    elif k.shape == (ne, 2, 2):
        k = np.broadcast_to(k[:, None], (ne, nq, 2, 2))
    elif k.shape != (ne, nq, 2, 2):
        raise ConfigurationError(f"tensor field of shape {k.shape} does not fit a mesh with {ne} elements")
    return k


def _scatter(mesh, ke):
    rows = np.broadcast_to(mesh.elements[:, :, None], ke.shape).ravel()
    cols = np.broadcast_to(mesh.elements[:, None, :], ke.shape).ravel()
    n = mesh.n_nodes
    return sp.coo_matrix((ke.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def assemble_stiffness(mesh, tensor, check=True):
    """Global matrix with entries ``sum_e int grad(phi_i) . K grad(phi_j)``.

    Nonsymmetric whenever ``K`` has an antisymmetric part. With
    ``check=True`` an ``AssemblyError`` is raised if the symmetric part of
    ``K`` is not positive definite at some quadrature point.
    """
    geo = geometry(mesh)
    k = tensor_field(mesh, tensor)
    if check and not np.all(is_admissible(k)):
        raise AssemblyError("conductivity tensor with non positive-definite symmetric part")
    ke = np.einsum("eqai,eqij,eqbj,eq->eab", geo.grad, k, geo.grad, geo.wdet)
    return _scatter(mesh, ke)


def assemble_laplacian(mesh):
    return assemble_stiffness(mesh, np.eye(2))


def assemble_mass(mesh):
    geo = geometry(mesh)
    me = np.einsum("qa,qb,eq->eab", geo.N, geo.N, geo.wdet)
    return _scatter(mesh, me)


def assemble_load(mesh, source):
    """Load vector ``int phi_i Q``.

    ``source`` is a scalar, one value per element, or a callable of the
    quadrature points returning ``(ne, nq)`` values.
    """
    geo = geometry(mesh)
    ne, nq = geo.wdet.shape
    if callable(source):
        q = np.asarray(source(geo.points), dtype=float)
    else:
        q = np.asarray(source, dtype=float)
        q = np.broadcast_to(q[..., None] if q.ndim == 1 else q, (ne, nq))
    fe = np.einsum("qa,eq,eq->ea", geo.N, q, geo.wdet)
    return np.bincount(mesh.elements.ravel(), weights=fe.ravel(), minlength=mesh.n_nodes)


def source_field(mesh, magnitude, tag):
    """Elementwise constant source: ``magnitude`` on elements tagged ``tag``, zero elsewhere."""
    return np.where(mesh.region_mask(tag), float(magnitude), 0.0)


@dataclass(frozen=True)
class LinearSystem:
    matrix: sp.csr_matrix   # reduced to free nodes
    rhs: np.ndarray
    free: np.ndarray        # free index -> mesh node
    n_nodes: int

    def expand(self, x_free):
        x = np.zeros(self.n_nodes)
        x[self.free] = x_free
        return x


def apply_dirichlet(matrix, rhs, mesh):
    """Eliminate rows and columns of Dirichlet nodes (homogeneous data)."""
    free = mesh.free_nodes()
    A = sp.csr_matrix(matrix)[free][:, free]
    return LinearSystem(matrix=A.tocsr(), rhs=np.asarray(rhs, dtype=float)[free], free=free, n_nodes=mesh.n_nodes)


class Factorization:
    """Sparse LU of a (possibly nonsymmetric) matrix with residual-checked solves.

    One factorization serves both ``A x = b`` and ``A^T y = c``.
    """

    def __init__(self, matrix, tol=1e-10):
        self.matrix = sp.csc_matrix(matrix)
        self.tol = tol
        try:
            self._lu = spla.splu(self.matrix)
        except RuntimeError as exc:
            raise NumericalError(f"sparse LU failed: {exc}") from exc

    def _checked(self, A, x, b):
        nb = np.linalg.norm(b)
        res = np.linalg.norm(A @ x - b) / nb if nb > 0 else np.linalg.norm(A @ x)
        if not np.all(np.isfinite(x)) or res > self.tol:
            raise NumericalError(f"linear solve residual {res:.3e} exceeds tolerance {self.tol:.1e}", residual=res)
        return x

    def solve(self, b):
        b = np.asarray(b, dtype=float)
        if not np.any(b):
            return np.zeros_like(b)
        return self._checked(self.matrix, self._lu.solve(b), b)

    def solve_transpose(self, b):
        b = np.asarray(b, dtype=float)
        if not np.any(b):
            return np.zeros_like(b)
        return self._checked(self.matrix.T, self._lu.solve(b, trans="T"), b)


def solve_linear(system, tol=1e-10):
    """Solve a reduced system and return the full nodal field (zeros on Dirichlet nodes)."""
    return system.expand(Factorization(system.matrix, tol).solve(system.rhs))


def recover_flux(mesh, tensor, T):
    """Heat flux ``q = -K grad T`` at element centers, shape ``(ne, 2)``.

    ``tensor`` is a constant ``(2, 2)`` array, per-element ``(ne, 2, 2)``,
    or a callable of the element centers ``(ne, 2)``.
    """
    g = np.einsum("eai,ea->ei", center_gradients(mesh), np.asarray(T, dtype=float)[mesh.elements])
    k = tensor(mesh.centroids()) if callable(tensor) else tensor
    k = np.broadcast_to(np.asarray(k, dtype=float), (mesh.n_elements, 2, 2))
    return -np.einsum("eij,ej->ei", k, g)


def assemble_update_system(mesh, dt, radius):
    """``M + dt R^2 K_lap`` for the implicit reaction-diffusion design update (natural BCs)."""
    if not dt > 0 or radius < 0:
        raise ConfigurationError(f"need dt > 0 and R >= 0, got dt={dt}, R={radius}")
    M = assemble_mass(mesh)
    if radius == 0:
        return M
    return (M + (dt * radius ** 2) * assemble_laplacian(mesh)).tocsr()
