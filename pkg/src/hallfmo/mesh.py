"""Structured quadrilateral meshes with element region tags and boundary edge tags.

Nodes are numbered row by row, ``node = j * (nx + 1) + i``, and elements
likewise, ``elem = j * nx + i``. Every element lists its four corners
counterclockwise starting from the lower-left one.
"""
from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, EmptyRegionError, WellPosednessError


class Region(enum.IntEnum):
    BULK = 0
    HEAT = 1            # heat source domain
    PROTECT = 2         # domain kept cold
    PROTECT_PRIME = 3   # second target domain of the switching problem


class Boundary(enum.IntEnum):
    NEUMANN = 0
    DIRICHLET = 1


class Side(enum.IntEnum):
    BOTTOM = 0
    RIGHT = 1
    TOP = 2
    LEFT = 3


def _as_enum(cls, value):
    if isinstance(value, cls):
        return value
    if isinstance(value, str):
        try:
            return cls[value.strip().upper().replace("-", "_")]
        except KeyError:
            names = ", ".join(m.name.lower() for m in cls)
            raise ConfigurationError(f"unknown {cls.__name__.lower()} {value!r}; expected one of {names}") from None
    return cls(int(value))


@dataclass(frozen=True)
class RegionSpec:
    """Axis-aligned rectangle ``(xmin, ymin, xmax, ymax)`` carrying a target tag."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float
    tag: Region

    def __post_init__(self):
        object.__setattr__(self, "tag", _as_enum(Region, self.tag))
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise ConfigurationError(f"degenerate region rectangle {self.bounds}")

    @property
    def bounds(self):
        return (self.xmin, self.ymin, self.xmax, self.ymax)

    @classmethod
    def centered(cls, cx, cy, width, height, tag):
        return cls(cx - width / 2, cy - height / 2, cx + width / 2, cy + height / 2, tag)


@dataclass(frozen=True, eq=False)
class Mesh:
    nx: int
    ny: int
    width: float
    height: float
    nodes: np.ndarray          # (n_nodes, 2)
    elements: np.ndarray       # (n_elems, 4), counterclockwise
    regions: np.ndarray        # (n_elems,) Region values
    edges: np.ndarray          # (n_edges, 2) boundary edge node pairs
    edge_elements: np.ndarray  # (n_edges,) owning element
    edge_sides: np.ndarray     # (n_edges,) Side values
    edge_tags: np.ndarray      # (n_edges,) Boundary values

    def __post_init__(self):
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if isinstance(value, np.ndarray):
                value.setflags(write=False)

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    @property
    def n_elements(self):
        return self.elements.shape[0]

    @property
    def h(self):
        """Edge length of the (square) elements; the larger one if they are rectangular."""
        return max(self.width / self.nx, self.height / self.ny)

    def centroids(self):
        return self.nodes[self.elements].mean(axis=1)

    def region_mask(self, tag):
        return self.regions == _as_enum(Region, tag)

    def dirichlet_nodes(self):
        """Sorted node indices lying on at least one Dirichlet edge."""
        mask = self.edge_tags == Boundary.DIRICHLET
        return np.unique(self.edges[mask])

    def free_nodes(self):
        fixed = self.dirichlet_nodes()
        if fixed.size == 0:
            raise WellPosednessError("no Dirichlet boundary edge: the temperature is determined only up to a constant")
        return np.setdiff1d(np.arange(self.n_nodes), fixed)

    def equals(self, other):
        return all(
            np.array_equal(getattr(self, f.name), getattr(other, f.name))
            for f in dataclasses.fields(self)
        )

    def mirror_x_nodes(self):
        """Permutation mapping node ``n`` to its image under ``x -> width - x``."""
        j, i = np.divmod(np.arange(self.n_nodes), self.nx + 1)
        return j * (self.nx + 1) + (self.nx - i)

    def mirror_x_elements(self):
        j, i = np.divmod(np.arange(self.n_elements), self.nx)
        return j * self.nx + (self.nx - 1 - i)


def build_structured_mesh(nx, ny, width=1.0, height=1.0):
    """Uniform ``nx`` by ``ny`` grid of bilinear quadrilaterals on ``[0, width] x [0, height]``.

    All elements start as ``Region.BULK`` and every boundary edge as
    ``Boundary.NEUMANN``.
    """
    if int(nx) != nx or int(ny) != ny or nx < 1 or ny < 1:
        raise ConfigurationError(f"element counts must be positive integers, got nx={nx}, ny={ny}")
    if not (width > 0 and height > 0):
        raise ConfigurationError(f"domain dimensions must be positive, got {width} x {height}")
    nx, ny = int(nx), int(ny)

    xs = np.linspace(0.0, width, nx + 1)
    ys = np.linspace(0.0, height, ny + 1)
    X, Y = np.meshgrid(xs, ys)
    nodes = np.column_stack([X.ravel(), Y.ravel()])

    j, i = np.divmod(np.arange(nx * ny), nx)
    n0 = j * (nx + 1) + i
    elements = np.column_stack([n0, n0 + 1, n0 + nx + 2, n0 + nx + 1])

    edges, owners, sides = [], [], []
    # counterclockwise walk of the boundary
    for i in range(nx):
        edges.append((i, i + 1)); owners.append(i); sides.append(Side.BOTTOM)
    for j in range(ny):
        a = j * (nx + 1) + nx
        edges.append((a, a + nx + 1)); owners.append(j * nx + nx - 1); sides.append(Side.RIGHT)
    for i in range(nx - 1, -1, -1):
        a = ny * (nx + 1) + i
        edges.append((a + 1, a)); owners.append((ny - 1) * nx + i); sides.append(Side.TOP)
    for j in range(ny - 1, -1, -1):
        a = j * (nx + 1)
        edges.append((a + nx + 1, a)); owners.append(j * nx); sides.append(Side.LEFT)

    return Mesh(
        nx=nx, ny=ny, width=float(width), height=float(height),
        nodes=nodes,
        elements=elements,
        regions=np.full(nx * ny, Region.BULK, dtype=np.int8),
        edges=np.array(edges, dtype=np.int64),
        edge_elements=np.array(owners, dtype=np.int64),
        edge_sides=np.array(sides, dtype=np.int8),
        edge_tags=np.full(len(edges), Boundary.NEUMANN, dtype=np.int8),
    )


def tag_region(mesh, spec):
    """Return a copy of ``mesh`` where elements with centroid inside ``spec`` carry ``spec.tag``.

    Centroids on the rectangle boundary count as inside. Raises
    ``EmptyRegionError`` when the rectangle contains no centroid.
    """
    xmin, ymin, xmax, ymax = spec.bounds
    if xmin < 0 or ymin < 0 or xmax > mesh.width or ymax > mesh.height:
        raise ConfigurationError(f"region {spec.bounds} extends outside the domain")
    c = mesh.centroids()
    inside = (c[:, 0] >= xmin) & (c[:, 0] <= xmax) & (c[:, 1] >= ymin) & (c[:, 1] <= ymax)
    if not inside.any():
        raise EmptyRegionError(f"region {spec.tag.name.lower()} {spec.bounds} contains no element centroid")
    regions = mesh.regions.copy()
    regions[inside] = spec.tag
    return dataclasses.replace(mesh, regions=regions)


def tag_boundary(mesh, side, interval=None, kind=Boundary.DIRICHLET):
    """Retag boundary edges of one side of the domain.

    ``interval`` is a ``(lo, hi)`` range of the coordinate running along the
    side (x for bottom/top, y for left/right); an edge is selected when its
    midpoint falls inside. ``None`` selects the whole side.
    """
    side = _as_enum(Side, side)
    kind = _as_enum(Boundary, kind)
    along = 0 if side in (Side.BOTTOM, Side.TOP) else 1
    length = mesh.width if along == 0 else mesh.height
    lo, hi = (0.0, length) if interval is None else map(float, interval)
    if not (0.0 <= lo < hi <= length):
        raise ConfigurationError(f"interval ({lo}, {hi}) is not within the {side.name.lower()} side [0, {length}]")

    mid = mesh.nodes[mesh.edges].mean(axis=1)[:, along]
    sel = (mesh.edge_sides == side) & (mid >= lo) & (mid <= hi)
    tags = mesh.edge_tags.copy()
    tags[sel] = kind
    return dataclasses.replace(mesh, edge_tags=tags)


def element_areas(mesh):
    """Exact areas of the (planar) quadrilaterals by the shoelace formula."""
    p = mesh.nodes[mesh.elements]
    x, y = p[..., 0], p[..., 1]
    return 0.5 * np.sum(x * np.roll(y, -1, axis=1) - np.roll(x, -1, axis=1) * y, axis=1)
