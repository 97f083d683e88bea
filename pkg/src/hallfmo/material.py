"""Design fields to effective (possibly asymmetric) conductivity tensors.

The effective tensor is

    [[k + k11,        k12 - a*b*k],
     [k12 + a*b*k,    k + k22    ]]

where ``(k11, k22)`` is the bilinear image of ``(xi, eta)`` over four vertices
that bound the trace of the anisotropic part to ``[c*eps, c]``,
``k12 = s * sqrt((1 - eps') k11 k22)`` keeps its determinant positive, and
``a`` scales the Hall contribution bounded by ``b``.

Every function broadcasts over numpy arrays; tensors have trailing shape
``(2, 2)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError

DESIGN_NAMES = ("xi", "eta", "s", "a")

# Roundoff allowance on the [-1, 1] box; interpolated nodal values may
# overshoot by a few ulps.
_BOX_SLACK = 1e-12


@dataclass(frozen=True)
class MaterialParams:
    k: float = 10.0         # isotropic conductivity of the Hall-active material
    c: float = 20.0         # trace bound of the anisotropic part
    b: float = 0.3          # bound on |R_TH * B_z|
    eps: float = 1e-4       # trace floor
    eps_prime: float = 1e-4  # determinant floor

    def __post_init__(self):
        if not self.k > 0:
            raise ConfigurationError(f"k must be positive, got {self.k}")
        if not self.c > 0:
            raise ConfigurationError(f"c must be positive, got {self.c}")
        if not self.b >= 0:
            raise ConfigurationError(f"b must be non-negative, got {self.b}")
        if not 0 < self.eps <= 1:
            raise ConfigurationError(f"eps must lie in (0, 1], got {self.eps}")
        if not 0 < self.eps_prime <= 1:
            raise ConfigurationError(f"eps_prime must lie in (0, 1], got {self.eps_prime}")

    def vertices(self):
        """The four corners v1..v4 of the admissible (k11, k22) quadrilateral, shape (4, 2)."""
        c, e = self.c, self.eps
        return np.array([
            [c * e / 2, c * e / 2],
            [c - c * e / 2, c * e / 2],
            [c * e / 2, c - c * e / 2],
            [c / 2, c / 2],
        ])


def _check_box(*values):
    for v in values:
        v = np.asarray(v)
        if v.size and (np.any(~np.isfinite(v)) or np.max(np.abs(v)) > 1 + _BOX_SLACK):
            raise DomainError(f"design value outside [-1, 1]: max |value| = {np.max(np.abs(v))}")


def diag_from_xi_eta(xi, eta, params):
    """Diagonal entries ``(k11, k22)`` of the anisotropic tensor."""
    _check_box(xi, eta)
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    v = params.vertices()
    n1 = 0.25 * (1 - xi) * (1 - eta)
    n2 = 0.25 * (1 + xi) * (1 - eta)
    n3 = 0.25 * (1 - xi) * (1 + eta)
    n4 = 0.25 * (1 + xi) * (1 + eta)
    k11 = n1 * v[0, 0] + n2 * v[1, 0] + n3 * v[2, 0] + n4 * v[3, 0]
    k22 = n1 * v[0, 1] + n2 * v[1, 1] + n3 * v[2, 1] + n4 * v[3, 1]
    return k11, k22


def _diag_derivatives(xi, eta, params):
    # written as vertex differences so that coincident vertices give exact zeros
    v = params.vertices()
    d_xi = 0.25 * ((1 - eta)[..., None] * (v[1] - v[0]) + (1 + eta)[..., None] * (v[3] - v[2]))
    d_eta = 0.25 * ((1 - xi)[..., None] * (v[2] - v[0]) + (1 + xi)[..., None] * (v[3] - v[1]))
    return d_xi, d_eta


def offdiag_from_s(s, k11, k22, params):
    """Off-diagonal entry ``k12 = s * sqrt((1 - eps') k11 k22)``."""
    _check_box(s)
    return np.asarray(s, dtype=float) * np.sqrt((1.0 - params.eps_prime) * k11 * k22)


def hall_term(a, params):
    """Hall contribution ``a * b * k``; enters the tensor antisymmetrically."""
    _check_box(a)
    return np.asarray(a, dtype=float) * params.b * params.k


def effective_tensor(xi, eta, s, a, params):
    xi, eta, s, a = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (xi, eta, s, a)))
    k11, k22 = diag_from_xi_eta(xi, eta, params)
    k12 = offdiag_from_s(s, k11, k22, params)
    w = hall_term(a, params)
    out = np.empty(xi.shape + (2, 2))
    out[..., 0, 0] = params.k + k11
    out[..., 0, 1] = k12 - w
    out[..., 1, 0] = k12 + w
    out[..., 1, 1] = params.k + k22
    return out


def tensor_derivatives(xi, eta, s, a, params):
    """Analytic partial derivatives of :func:`effective_tensor`.

    Returns a dict keyed by ``"xi", "eta", "s", "a"`` of arrays with
    trailing shape ``(2, 2)``.
    """
    xi, eta, s, a = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (xi, eta, s, a)))
    _check_box(xi, eta, s, a)
    k11, k22 = diag_from_xi_eta(xi, eta, params)
    d_xi, d_eta = _diag_derivatives(xi, eta, params)
    root = np.sqrt((1.0 - params.eps_prime) * k11 * k22)
    # d sqrt((1-e') k11 k22) = sqrt(1-e') (k22 dk11 + k11 dk22) / (2 sqrt(k11 k22))
    scale = np.sqrt(1.0 - params.eps_prime) / (2.0 * np.sqrt(k11 * k22))

    out = {}
    for name, d in (("xi", d_xi), ("eta", d_eta)):
        dk12 = s * scale * (k22 * d[..., 0] + k11 * d[..., 1])
        t = np.zeros(xi.shape + (2, 2))
        t[..., 0, 0] = d[..., 0]
        t[..., 1, 1] = d[..., 1]
        t[..., 0, 1] = dk12
        t[..., 1, 0] = dk12
        out[name] = t

    t = np.zeros(xi.shape + (2, 2))
    t[..., 0, 1] = root
    t[..., 1, 0] = root
    out["s"] = t

    bk = params.b * params.k
    t = np.zeros(xi.shape + (2, 2))
    t[..., 0, 1] = -bk
    t[..., 1, 0] = bk
    out["a"] = t
    return out


def symmetric_part(tensor):
    return 0.5 * (tensor + np.swapaxes(tensor, -1, -2))


def antisymmetric_part(tensor):
    return 0.5 * (tensor - np.swapaxes(tensor, -1, -2))


def is_admissible(tensor):
    """Boolean mask: symmetric part positive definite (trace and determinant positive)."""
    sym = symmetric_part(np.asarray(tensor, dtype=float))
    tr = sym[..., 0, 0] + sym[..., 1, 1]
    det = sym[..., 0, 0] * sym[..., 1, 1] - sym[..., 0, 1] * sym[..., 1, 0]
    return (tr > 0) & (det > 0)


def orientation_angle(k11, k22, k12):
    """Angle (radians) of the principal eigenvector of the symmetric 2x2 tensor [[k11, k12], [k12, k22]]."""
    return 0.5 * np.arctan2(2.0 * np.asarray(k12), np.asarray(k11) - np.asarray(k22))


@dataclass
class DesignFields:
    """Nodal design fields, each valued in [-1, 1].

    ``a_prime`` is the Hall field of the second state of the switching
    problem and is ``None`` otherwise.
    """

    xi: np.ndarray
    eta: np.ndarray
    s: np.ndarray
    a: np.ndarray
    a_prime: np.ndarray | None = None

    def __post_init__(self):
        arrays = [np.array(v, dtype=float) for v in (self.xi, self.eta, self.s, self.a)]
        if len({v.shape for v in arrays}) != 1 or arrays[0].ndim != 1:
            raise ConfigurationError("design fields must be 1-D arrays of equal length")
        self.xi, self.eta, self.s, self.a = arrays
        if self.a_prime is not None:
            self.a_prime = np.array(self.a_prime, dtype=float)
            if self.a_prime.shape != self.xi.shape:
                raise ConfigurationError("a_prime must match the other design fields")
        _check_box(*self.fields().values())

    @classmethod
    def constant(cls, n_nodes, xi=0.0, eta=0.0, s=0.0, a=0.0, a_prime=None):
        full = lambda v: np.full(n_nodes, float(v))
        return cls(full(xi), full(eta), full(s), full(a), None if a_prime is None else full(a_prime))

    @property
    def names(self):
        return DESIGN_NAMES + (("a_prime",) if self.a_prime is not None else ())

    def fields(self):
        return {name: getattr(self, name) for name in self.names}

    def hall(self, state=0):
        """Hall field driving ``state`` (0: ``a``, 1: ``a_prime``)."""
        if state == 0:
            return self.a
        if self.a_prime is None:
            raise ConfigurationError("design has no a_prime field for a second state")
        return self.a_prime

    def copy(self):
        return DesignFields(**{k: v.copy() for k, v in self.fields().items()})
