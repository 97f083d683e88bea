"""Objective functionals and their derivatives with respect to the nodal temperature."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .fem import assemble_load, geometry, interpolate
from .mesh import Region

TEMP_MIN = "temp-min"
SWITCHING = "switching"
PROBLEMS = (TEMP_MIN, SWITCHING)


@dataclass(frozen=True)
class ObjectiveValue:
    value: float
    terms: tuple  # ((label, signed value), ...)

    def __float__(self):
        return float(self.value)


def _region_mask(mesh, tag):
    mask = mesh.region_mask(tag)
    if not mask.any():
        raise ConfigurationError(f"region {Region(tag).name.lower()} is not tagged on the mesh")
    return mask


def region_integral(T, mesh, tag):
    """Integral of the bilinear interpolant of ``T`` over elements tagged ``tag``."""
    mask = _region_mask(mesh, tag)
    vals = interpolate(mesh, T)[mask]
    return float(np.sum(vals * geometry(mesh).wdet[mask]))


def region_load(mesh, tag):
    """Vector of ``int_region phi_i``; the exact derivative of :func:`region_integral`."""
    mask = _region_mask(mesh, tag)
    return assemble_load(mesh, mask.astype(float))


def temp_min_objective(T, mesh):
    ip = region_integral(T, mesh, Region.PROTECT)
    return ObjectiveValue(ip, (("+I_p(T)", ip),))


def switching_objective(T, T_prime, mesh):
    """``I_p(T) - I_p'(T) + I_p'(T') - I_p(T')``: heat avoids p in mode 1 and p' in mode 2."""
    terms = (
        ("+I_p(T)", region_integral(T, mesh, Region.PROTECT)),
        ("-I_p'(T)", -region_integral(T, mesh, Region.PROTECT_PRIME)),
        ("+I_p'(T')", region_integral(T_prime, mesh, Region.PROTECT_PRIME)),
        ("-I_p(T')", -region_integral(T_prime, mesh, Region.PROTECT)),
    )
    return ObjectiveValue(sum(v for _, v in terms), terms)


def adjoint_rhs(kind, state, mesh):
    """Derivative of the objective with respect to the nodal temperature of ``state``.

    ``state`` is 0 for T (mode 1) and 1 for T' (mode 2, switching only).
    """
    if kind == TEMP_MIN:
        if state != 0:
            raise ConfigurationError("temperature minimization has a single state")
        return region_load(mesh, Region.PROTECT)
    if kind == SWITCHING:
        d = region_load(mesh, Region.PROTECT) - region_load(mesh, Region.PROTECT_PRIME)
        if state == 0:
            return d
        if state == 1:
            return -d
        raise ConfigurationError(f"switching problem has states 0 and 1, got {state}")
    raise ConfigurationError(f"unknown objective {kind!r}; expected one of {PROBLEMS}")
