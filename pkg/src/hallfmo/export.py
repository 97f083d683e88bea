"""Field export: one CSV per nodal field and a legacy-VTK ASCII unstructured grid per run."""
from __future__ import annotations

import csv
import os

import numpy as np

VTK_QUAD = 9


def write_nodal_csv(path, mesh, values):
    """Write ``x,y,value`` rows in node order with 17 significant digits."""
    values = np.asarray(values, dtype=float)
    if values.shape != (mesh.n_nodes,):
        raise ValueError(f"field of shape {values.shape} does not match {mesh.n_nodes} nodes")
    with open(path, "w", newline="") as fh:
        fh.write("x,y,value\n")
        for (x, y), v in zip(mesh.nodes, values):
            fh.write(f"{x:.17g},{y:.17g},{v:.17g}\n")


def read_nodal_csv(path):
    """Return ``(coords, values)`` from a file written by :func:`write_nodal_csv`."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["x", "y", "value"]:
            raise ValueError(f"unexpected header {header}")
        rows = np.array([[float(c) for c in row] for row in reader])
    return rows[:, :2], rows[:, 2]


def _write_arrays(fh, data):
    for name, values in data.items():
        values = np.asarray(values)
        if np.issubdtype(values.dtype, np.integer):
            fh.write(f"SCALARS {name} int 1\nLOOKUP_TABLE default\n")
            fh.write("\n".join(str(int(v)) for v in values))
        else:
            fh.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
            fh.write("\n".join(f"{v:.17g}" for v in values.astype(float)))
        fh.write("\n")


def write_vtk(path, mesh, point_data=None, cell_data=None, title="hallfmo fields"):
    """Legacy VTK (version 2.0, ASCII) unstructured grid of quads with point and cell scalars."""
    point_data = dict(point_data or {})
    cell_data = dict(cell_data or {})
    for name, v in point_data.items():
        if np.shape(v) != (mesh.n_nodes,):
            raise ValueError(f"point field {name!r} does not match the node count")
    for name, v in cell_data.items():
        if np.shape(v) != (mesh.n_elements,):
            raise ValueError(f"cell field {name!r} does not match the element count")

    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    ne = mesh.n_elements
    with open(path, "w") as fh:
        fh.write(f"# vtk DataFile Version 2.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID\n")
        fh.write(f"POINTS {mesh.n_nodes} double\n")
        for x, y in mesh.nodes:
            fh.write(f"{x:.17g} {y:.17g} 0\n")
        fh.write(f"CELLS {ne} {5 * ne}\n")
        for cell in mesh.elements:
            fh.write("4 " + " ".join(str(int(n)) for n in cell) + "\n")
        fh.write(f"CELL_TYPES {ne}\n")
        fh.write("\n".join([str(VTK_QUAD)] * ne) + "\n")
        if point_data:
            fh.write(f"POINT_DATA {mesh.n_nodes}\n")
            _write_arrays(fh, point_data)
        if cell_data:
            fh.write(f"CELL_DATA {ne}\n")
            _write_arrays(fh, cell_data)


def export_fields(directory, mesh, nodal=None, cellwise=None, vtk_name="fields.vtk"):
    """Write ``<name>.csv`` for every nodal field plus one VTK file holding everything.

    Returns the list of written paths.
    """
    nodal = dict(nodal or {})
    os.makedirs(directory, exist_ok=True)
    paths = []
    for name, values in nodal.items():
        p = os.path.join(directory, f"{name}.csv")
        write_nodal_csv(p, mesh, values)
        paths.append(p)
    p = os.path.join(directory, vtk_name)
    write_vtk(p, mesh, nodal, cellwise)
    paths.append(p)
    return paths
