"""Command line entry point: ``hallfmo run <config> [--output DIR] [--max-iters N] [--quiet]``.

Exit codes: 0 success, 1 I/O error, 2 configuration error, 3 numerical
error, 4 optimization stopped at max_iters without meeting the stopping rule.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import os
import sys

import numpy as np

from .config import load_config, preset_names, preset_path
from .errors import AssemblyError, ConfigurationError, NumericalError, WellPosednessError
from .export import export_fields
from .fem import assemble_load, recover_flux, source_field
from .material import DesignFields, diag_from_xi_eta, effective_tensor, offdiag_from_s, orientation_angle
from .mesh import Region, build_structured_mesh, tag_boundary, tag_region
from .optimizer import CONVERGED, optimize
from .sensitivity import solve_state, state_tensor

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_NOT_CONVERGED = 0, 2, 3, 4

log = logging.getLogger("hallfmo")


def build_mesh(cfg):
    mesh = build_structured_mesh(cfg.nx, cfg.ny, cfg.width, cfg.height)
    for spec in cfg.regions:
        mesh = tag_region(mesh, spec)
    for side, interval, kind in cfg.boundary:
        mesh = tag_boundary(mesh, side, interval, kind)
    if cfg.mode == "switching":
        # a later region may have overwritten an earlier one entirely
        for tag in (Region.PROTECT, Region.PROTECT_PRIME):
            if not mesh.region_mask(tag).any():
                raise ConfigurationError(f"region {tag.name.lower()} lost all its elements to an overlapping region")
    return mesh


def _center_values(mesh, nodal):
    return np.clip(np.asarray(nodal)[mesh.elements].mean(axis=1), -1.0, 1.0)


def element_fields(mesh, design, params, temperatures):
    """Per-element flux, effective tensor components, orientation angle and region tag."""
    xi, eta, s = (_center_values(mesh, f) for f in (design.xi, design.eta, design.s))
    k11, k22 = diag_from_xi_eta(xi, eta, params)
    k12 = offdiag_from_s(s, k11, k22, params)
    out = {"region": mesh.regions.astype(np.int64), "orientation": orientation_angle(k11, k22, k12)}
    for st, T in enumerate(temperatures):
        sfx = "" if st == 0 else "_prime"
        K = effective_tensor(xi, eta, s, _center_values(mesh, design.hall(st)), params)
        q = recover_flux(mesh, K, T)
        out[f"flux_x{sfx}"], out[f"flux_y{sfx}"] = q[:, 0], q[:, 1]
        for (i, j) in ((0, 0), (0, 1), (1, 0), (1, 1)):
            out[f"k{i + 1}{j + 1}{sfx}"] = K[:, i, j]
    return out


def _write_history(path, result):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        labels = [lab for lab, _ in result.records[0].terms]
        w.writerow(["iteration", "J", *labels, "max_change", "ratio"])
        for r in result.records:
            w.writerow([r.iteration, f"{r.objective:.17g}", *(f"{v:.17g}" for _, v in r.terms),
                        f"{r.max_change:.17g}", f"{r.ratio:.17g}"])


def run(cfg, output=None, max_iters=None, quiet=False):
    """Execute a parsed :class:`~hallfmo.config.RunConfig`; returns the exit code."""
    outdir = output or cfg.output
    if max_iters is not None:
        cfg = dataclasses.replace(cfg, optimizer=dataclasses.replace(cfg.optimizer, max_iters=max_iters))
    mesh = build_mesh(cfg)
    load = assemble_load(mesh, source_field(mesh, cfg.source_magnitude, Region.HEAT))
    params = cfg.material
    summary = {"mode": cfg.mode, "title": cfg.title, "nodes": mesh.n_nodes, "elements": mesh.n_elements}
    code = EXIT_OK

    if cfg.mode == "forward":
        design = DesignFields.constant(mesh.n_nodes, **cfg.design)
        T, _ = solve_state(mesh, state_tensor(mesh, design, params), load, cfg.solver_tol)
        temps = [T]
        nodal = {"T": T}
    else:
        result = optimize(cfg.mode, mesh, params, cfg.optimizer, load)
        design, temps = result.design, result.temperatures
        nodal = {"T": temps[0]}
        if len(temps) > 1:
            nodal["T_prime"] = temps[1]
        nodal.update(design.fields())
        os.makedirs(outdir, exist_ok=True)
        _write_history(os.path.join(outdir, "history.csv"), result)
        summary.update(status=result.status, iterations=result.iterations,
                       J_initial=float(result.history[0]), J_final=float(result.history[-1]),
                       terms=dict(result.history[-1].terms))
        if result.status != CONVERGED:
            code = EXIT_NOT_CONVERGED

    cells = element_fields(mesh, design, params, temps)
    export_fields(outdir, mesh, nodal, cells)
    with open(os.path.join(outdir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2)
    if not quiet:
        print(json.dumps(summary, indent=2))
    return code


def main(argv=None):
    parser = argparse.ArgumentParser(prog="hallfmo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a forward analysis or an optimization from a TOML config")
    p_run.add_argument("config", help="config path, or the name of a bundled preset (see `hallfmo presets`)")
    p_run.add_argument("--output", help="output directory (overrides the config)")
    p_run.add_argument("--max-iters", type=int, help="iteration cap (overrides the config)")
    p_run.add_argument("--quiet", action="store_true", help="only report errors")
    sub.add_parser("presets", help="list bundled preset configs")
    args = parser.parse_args(argv)

    if args.command == "presets":
        for name in preset_names():
            print(f"{name}\t{preset_path(name)}")
        return EXIT_OK

    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    path = args.config
    try:
        if not os.path.exists(path) and path in preset_names():
            path = preset_path(path)
        cfg = load_config(path)
        if args.max_iters is not None and args.max_iters < 1:
            raise ConfigurationError("--max-iters must be positive")
        return run(cfg, args.output, args.max_iters, args.quiet)
    except (ConfigurationError, WellPosednessError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, AssemblyError) as exc:
        res = getattr(exc, "residual", None)
        extra = f" (relative residual {res:.3e})" if res is not None else ""
        print(f"numerical error: {exc}{extra}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
