"""Default experiment geometry and the preset material settings of the case studies.

Geometry (all overridable through run configs): unit square, heat source a
centered square of side 0.1, Dirichlet boundary on the whole bottom side,
protected square(s) of side 0.2 between the source and the cold side.
"""
from __future__ import annotations

from .errors import ConfigurationError
from .fem import assemble_load, source_field
from .material import MaterialParams
from .mesh import Boundary, Region, RegionSpec, build_structured_mesh, tag_boundary, tag_region

SOURCE_MAGNITUDE = 1.0e5

HEAT_REGION = RegionSpec.centered(0.5, 0.5, 0.1, 0.1, Region.HEAT)
PROTECT_REGION = RegionSpec.centered(0.5, 0.25, 0.2, 0.2, Region.PROTECT)
SWITCH_REGIONS = (
    RegionSpec.centered(0.3, 0.25, 0.2, 0.2, Region.PROTECT),
    RegionSpec.centered(0.7, 0.25, 0.2, 0.2, Region.PROTECT_PRIME),
)

# forward analyses: fixed design values (xi, eta, s, a)
FORWARD_CASES = {
    "1-1": (-1.0, -1.0, 0.0, 0.0),
    "1-2": (-1.0, -1.0, 0.0, 1.0),
    "1-3": (-1.0, -1.0, 0.0, -1.0),
}

# temperature minimization: isotropic settings use eps = eps' = 1, symmetric ones b = 0
TEMP_MIN_CASES = {
    "2-1": MaterialParams(b=0.0, eps=1.0, eps_prime=1.0),
    "2-2": MaterialParams(b=0.0, eps=1e-4, eps_prime=1e-4),
    "2-3": MaterialParams(b=0.3, eps=1.0, eps_prime=1.0),
    "2-4": MaterialParams(b=0.3, eps=1e-4, eps_prime=1e-4),
}

SWITCHING_PARAMS = MaterialParams(b=0.3, eps=1e-4, eps_prime=1e-4)


def regions_overlap(r1, r2):
    return not (r1.xmax <= r2.xmin or r2.xmax <= r1.xmin or r1.ymax <= r2.ymin or r2.ymax <= r1.ymin)


def build_problem_mesh(nx, ny=None, width=1.0, height=1.0, regions=(), dirichlet=(("bottom", None),)):
    """Mesh with the given regions tagged in order and the listed boundary pieces set to Dirichlet.

    ``dirichlet`` holds ``(side, interval)`` pairs; ``interval=None`` means
    the full side.
    """
    mesh = build_structured_mesh(nx, nx if ny is None else ny, width, height)
    tagged = [r for r in regions if r.tag != Region.HEAT]
    for i, r1 in enumerate(tagged):
        for r2 in tagged[i + 1:]:
            if r1.tag != r2.tag and regions_overlap(r1, r2):
                raise ConfigurationError(f"regions {r1.tag.name.lower()} and {r2.tag.name.lower()} overlap")
    for spec in regions:
        mesh = tag_region(mesh, spec)
    for side, interval in dirichlet:
        mesh = tag_boundary(mesh, side, interval, Boundary.DIRICHLET)
    return mesh


def default_mesh(n=32, kind="temp-min"):
    """Default geometry on an ``n`` by ``n`` unit-square mesh for ``forward``, ``temp-min`` or ``switching``."""
    if kind == "forward":
        regions = (HEAT_REGION,)
    elif kind == "temp-min":
        regions = (PROTECT_REGION, HEAT_REGION)
    elif kind == "switching":
        regions = SWITCH_REGIONS + (HEAT_REGION,)
    else:
        raise ConfigurationError(f"unknown problem kind {kind!r}")
    return build_problem_mesh(n, regions=regions)


def heat_load(mesh, magnitude=SOURCE_MAGNITUDE):
    return assemble_load(mesh, source_field(mesh, magnitude, Region.HEAT))
