import json
import os

import numpy as np
import pytest

from hallfmo import cli
from hallfmo.config import load_config, parse_config, preset_names, preset_path
from hallfmo.errors import ConfigurationError
from hallfmo.export import read_nodal_csv, write_nodal_csv, write_vtk
from hallfmo.mesh import build_structured_mesh


def read_vtk_sections(path):
    """Minimal reader: returns header counts and {name: array} for scalar blocks."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    out, counts, i = {}, {}, 0
    section_len = None
    while i < len(lines):
        tok = lines[i].split()
        if tok and tok[0] in ("POINTS", "CELLS", "CELL_TYPES", "POINT_DATA", "CELL_DATA"):
            counts[tok[0]] = [int(t) for t in tok[1:] if t.isdigit()]
            if tok[0] in ("POINT_DATA", "CELL_DATA"):
                section_len = int(tok[1])
        if tok and tok[0] == "SCALARS":
            vals = np.array([float(v) for v in lines[i + 2:i + 2 + section_len]])
            out[tok[1]] = vals
            i += 2 + section_len
            continue
        i += 1
    return counts, out


def test_single_element_csv(tmp_path):
    mesh = build_structured_mesh(1, 1)
    p = tmp_path / "T.csv"
    write_nodal_csv(p, mesh, np.arange(4.0))
    lines = p.read_text().splitlines()
    assert lines[0] == "x,y,value" and len(lines) == 5


def test_csv_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    mesh = build_structured_mesh(5, 4, 1.3, 0.7)
    v = rng.standard_normal(mesh.n_nodes) * 10.0 ** rng.integers(-300, 300, mesh.n_nodes)
    write_nodal_csv(tmp_path / "f.csv", mesh, v)
    coords, back = read_nodal_csv(tmp_path / "f.csv")
    np.testing.assert_array_equal(back, v)
    np.testing.assert_array_equal(coords, mesh.nodes)
    assert len((tmp_path / "f.csv").read_text().splitlines()) == mesh.n_nodes + 1


def test_csv_shape_mismatch(tmp_path):
    with pytest.raises(ValueError):
        write_nodal_csv(tmp_path / "x.csv", build_structured_mesh(2, 2), np.zeros(3))


def test_vtk_structure(tmp_path):
    mesh = build_structured_mesh(3, 2)
    p = tmp_path / "m.vtk"
    write_vtk(p, mesh, {"T": np.arange(mesh.n_nodes, dtype=float)}, {"region": np.zeros(6, dtype=int)})
    text = p.read_text()
    assert text.startswith("# vtk DataFile Version 2.0")
    counts, data = read_vtk_sections(p)
    assert counts["POINTS"] == [12]
    assert counts["CELLS"] == [6, 30]
    assert counts["CELL_TYPES"] == [6]
    assert "SCALARS region int 1" in text
    np.testing.assert_array_equal(data["T"], np.arange(12.0))


def run_preset(name, tmp_path, *extra):
    out = tmp_path / name
    code = cli.main(["run", name, "--output", str(out), "--quiet", *extra])
    return code, out


def test_case_1_1_tensor_is_constant(tmp_path):
    code, out = run_preset("case1-1", tmp_path)
    assert code == 0
    _, cells = read_vtk_sections(out / "fields.vtk")
    np.testing.assert_allclose(cells["k11"], 10.001, rtol=1e-13)
    np.testing.assert_allclose(cells["k22"], 10.001, rtol=1e-13)
    np.testing.assert_array_equal(cells["k12"], 0.0)
    np.testing.assert_array_equal(cells["k21"], 0.0)
    summary = json.loads((out / "summary.json").read_text())
    assert summary["mode"] == "forward" and summary["nodes"] == 33 * 33


def test_hall_cases_mirror(tmp_path):
    (_, o2), (_, o3) = run_preset("case1-2", tmp_path), run_preset("case1-3", tmp_path)
    mesh = cli.build_mesh(load_config(preset_path("case1-2")))
    _, T2 = read_nodal_csv(o2 / "T.csv")
    _, T3 = read_nodal_csv(o3 / "T.csv")
    scale = np.abs(T2).max()
    np.testing.assert_allclose(T3, T2[mesh.mirror_x_nodes()], atol=1e-8 * scale)
    _, c2 = read_vtk_sections(o2 / "fields.vtk")
    _, c3 = read_vtk_sections(o3 / "fields.vtk")
    m = mesh.mirror_x_elements()
    qs = np.abs(c2["flux_x"]).max()
    np.testing.assert_allclose(c3["flux_x"], -c2["flux_x"][m], atol=1e-8 * qs)
    np.testing.assert_allclose(c3["flux_y"], c2["flux_y"][m], atol=1e-8 * qs)
    # the Hall term tilts the flux sideways: net horizontal flux is nonzero and flips sign
    assert c2["flux_x"].sum() * c3["flux_x"].sum() < 0


def test_optimization_run_writes_history(tmp_path):
    code, out = run_preset("case2-4", tmp_path, "--max-iters", "3")
    assert code == 4
    for name in ("T", "xi", "eta", "s", "a"):
        assert (out / f"{name}.csv").exists()
    rows = (out / "history.csv").read_text().splitlines()
    assert rows[0].startswith("iteration,J,+I_p(T)") and len(rows) == 4
    summary = json.loads((out / "summary.json").read_text())
    assert summary["status"] == "max_iters" and summary["iterations"] == 3


def test_switching_run_writes_both_states(tmp_path):
    code, out = run_preset("switching", tmp_path, "--max-iters", "2")
    assert code == 4
    for name in ("T", "T_prime", "a", "a_prime"):
        assert (out / f"{name}.csv").exists()
    _, cells = read_vtk_sections(out / "fields.vtk")
    assert {"flux_x_prime", "k12_prime"} <= set(cells)


def test_degenerate_preset_converges(tmp_path):
    code, out = run_preset("case2-1", tmp_path)
    assert code == 0
    assert json.loads((out / "summary.json").read_text())["iterations"] == 2


def write_config(tmp_path, text):
    p = tmp_path / "c.toml"
    p.write_text(text)
    return str(p)


BASE = """
mode = "temp-min"
[mesh]
nx = 16
ny = 16
[[boundary]]
side = "bottom"
kind = "dirichlet"
[[regions]]
tag = "heat"
rect = [0.4, 0.4, 0.6, 0.6]
"""


def test_missing_protect_region_exit_code(tmp_path, capsys):
    code = cli.main(["run", write_config(tmp_path, BASE), "--quiet"])
    assert code == 2
    err = capsys.readouterr().err
    assert "protect" in err


def test_numerical_failure_exit_code(tmp_path, capsys):
    text = BASE.replace('mode = "temp-min"', 'mode = "temp-min"\nsolver_tol = 1e-300') + \
        '[[regions]]\ntag = "protect"\nrect = [0.3, 0.1, 0.7, 0.3]\n'
    code = cli.main(["run", write_config(tmp_path, text), "--quiet", "--output", str(tmp_path / "o")])
    assert code == 3
    assert "residual" in capsys.readouterr().err


def test_missing_file_exit_code(tmp_path):
    assert cli.main(["run", str(tmp_path / "nope.toml"), "--quiet"]) == 2


def test_unwritable_output_exit_code(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert cli.main(["run", "case1-1", "--output", str(blocker / "sub"), "--quiet"]) == 1


def test_presets_listing(capsys):
    assert cli.main(["presets"]) == 0
    out = capsys.readouterr().out
    for name in ("case1-1", "case2-4", "switching"):
        assert name in out
    assert len(preset_names()) == 8


@pytest.mark.parametrize("name", ["case1-1", "case1-2", "case1-3", "case2-1", "case2-2", "case2-3", "case2-4", "switching"])
def test_presets_parse(name):
    cfg = load_config(preset_path(name))
    assert cfg.nx == cfg.ny == 32
    assert cli.build_mesh(cfg).n_elements == 1024


@pytest.mark.parametrize("bad, fragment", [
    ('mode = "other"', "mode must be one of"),
    ('mode = "temp-min"\ncolour = 1', "unknown key 'colour'"),
    ('mode = "temp-min"\n[mesh]\nnx = 0', "positive"),
    ('mode = "temp-min"\n[mesh]\nnx = 4\n[[regions]]\ntag = "heat"\nrect = [0.4, 0.4, 0.6]', "rect"),
    ('mode = "forward"\n[[regions]]\ntag = "heat"\nrect = [0.4, 0.4, 0.6, 0.6]\n[[boundary]]\nside = "top"\nkind = "neumann"',
     "Dirichlet"),
])
def test_config_errors(bad, fragment):
    with pytest.raises(ConfigurationError, match=fragment):
        parse_config(bad, "bad.toml")


def test_config_error_reports_line():
    text = BASE + "\n[material]\nk = -1.0\n"
    line = text.splitlines().index("[material]") + 1
    with pytest.raises(ConfigurationError, match=rf"bad.toml:{line}: "):
        parse_config(text, "bad.toml")


def test_design_outside_box():
    text = BASE.replace("temp-min", "forward") + "[design]\nxi = 1.5\n"
    with pytest.raises(ConfigurationError, match="outside"):
        parse_config(text, "d.toml")


def test_config_defaults():
    cfg = parse_config(BASE + '[[regions]]\ntag = "protect"\nrect = [0.3, 0.1, 0.7, 0.3]\n', "ok.toml")
    assert cfg.material.b == 0.3 and cfg.optimizer.max_iters == 1000
    assert os.path.basename(cfg.source_path) == "ok.toml"
