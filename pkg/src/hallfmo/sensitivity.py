"""Discrete adjoint gradients of the objectives with respect to the nodal design fields.

For a state ``K(phi) T = F`` and objective ``J(T)``, the adjoint ``lam``
solves ``K^T lam = dJ/dT`` with the same homogeneous Dirichlet data, and

    dJ/dphi_n = -lam^T (dK/dphi_n) T
              = -sum_e sum_q w_q N_n(q) grad(lam) . (dK/dphi) grad(T).

The adjoint system reuses the LU factors of the forward matrix.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .fem import (
    Factorization,
    apply_dirichlet,
    assemble_stiffness,
    geometry,
    gradient,
    interpolate,
)
from .material import effective_tensor, tensor_derivatives
from .objectives import SWITCHING, TEMP_MIN, adjoint_rhs, switching_objective, temp_min_objective


def quadrature_design(mesh, design, state=0):
    """Design values ``(xi, eta, s, a)`` interpolated to the quadrature points."""
    return tuple(
        np.clip(interpolate(mesh, f), -1.0, 1.0)
        for f in (design.xi, design.eta, design.s, design.hall(state))
    )


def state_tensor(mesh, design, params, state=0):
    """Effective tensor at every quadrature point for ``state``, shape ``(ne, nq, 2, 2)``."""
    return effective_tensor(*quadrature_design(mesh, design, state), params)


def solve_state(mesh, tensor, load, tol=1e-10):
    """Forward solve; returns the nodal temperature and the reusable factorization."""
    K = assemble_stiffness(mesh, tensor)
    system = apply_dirichlet(K, load, mesh)
    fac = Factorization(system.matrix, tol)
    return system.expand(fac.solve(system.rhs)), (fac, system)


def solve_adjoint(mesh, tensor, rhs, tol=1e-10, factorization=None):
    """Adjoint field: ``K^T lam = rhs`` on free nodes, ``lam = 0`` on Dirichlet nodes.

    ``K^T`` equals the stiffness assembled with the transposed tensor. When a
    ``(Factorization, LinearSystem)`` pair from :func:`solve_state` is
    passed, its factors are reused.
    """
    if factorization is None:
        K = assemble_stiffness(mesh, tensor)
        system = apply_dirichlet(K, rhs, mesh)
        fac = Factorization(system.matrix, tol)
    else:
        fac, system = factorization
    free = system.free
    return system.expand(fac.solve_transpose(np.asarray(rhs, dtype=float)[free]))


def gradient_density(grad_T, grad_lam, dtensor):
    """Pointwise integrand ``-grad(lam) . dK grad(T)``."""
    return -np.einsum("...i,...ij,...j->...", grad_lam, dtensor, grad_T)


def _nodal(mesh, density):
    geo = geometry(mesh)
    fe = np.einsum("qa,eq,eq->ea", geo.N, density, geo.wdet)
    return np.bincount(mesh.elements.ravel(), weights=fe.ravel(), minlength=mesh.n_nodes)


def pointwise_gradient(T, lam, design, params, mesh, state=0):
    """Gradient of J with respect to ``xi, eta, s`` and the Hall field of ``state``.

    Keys are ``"xi", "eta", "s", "a"``; for ``state=1`` the Hall entry is
    the derivative with respect to ``a_prime`` but is still keyed ``"a"``.
    """
    for name, f in (("T", T), ("lam", lam)):
        if np.shape(f) != (mesh.n_nodes,):
            raise ConfigurationError(f"{name} has shape {np.shape(f)}, mesh has {mesh.n_nodes} nodes")
    gT = gradient(mesh, T)
    gl = gradient(mesh, lam)
    derivs = tensor_derivatives(*quadrature_design(mesh, design, state), params)
    return {name: _nodal(mesh, gradient_density(gT, gl, d)) for name, d in derivs.items()}


def switching_gradient(T, T_prime, lam, lam_prime, design, params, mesh):
    """Combine per-state gradients: shared fields add, ``a`` and ``a_prime`` stay separate."""
    g1 = pointwise_gradient(T, lam, design, params, mesh, state=0)
    g2 = pointwise_gradient(T_prime, lam_prime, design, params, mesh, state=1)
    out = {name: g1[name] + g2[name] for name in ("xi", "eta", "s")}
    out["a"] = g1["a"]
    out["a_prime"] = g2["a"]
    return out


@dataclass
class Evaluation:
    objective: object            # ObjectiveValue
    temperatures: list           # [T] or [T, T']
    adjoints: list | None = None
    gradients: dict | None = None


def evaluate(kind, mesh, design, params, load, tol=1e-10, with_gradient=True):
    """Forward solve(s), objective and (optionally) the adjoint gradient for one design."""
    if kind == TEMP_MIN:
        states = (0,)
    elif kind == SWITCHING:
        states = (0, 1)
    else:
        raise ConfigurationError(f"unknown objective {kind!r}")

    temps, facs = [], []
    for st in states:
        T, fac = solve_state(mesh, state_tensor(mesh, design, params, st), load, tol)
        temps.append(T)
        facs.append(fac)
    obj = temp_min_objective(temps[0], mesh) if kind == TEMP_MIN else switching_objective(*temps, mesh)
    if not with_gradient:
        return Evaluation(obj, temps)

    lams = [solve_adjoint(mesh, None, adjoint_rhs(kind, st, mesh), tol, facs[st]) for st in states]
    if kind == TEMP_MIN:
        grads = pointwise_gradient(temps[0], lams[0], design, params, mesh)
    else:
        grads = switching_gradient(temps[0], temps[1], lams[0], lams[1], design, params, mesh)
    return Evaluation(obj, temps, lams, grads)
