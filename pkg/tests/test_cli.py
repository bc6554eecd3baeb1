"""End-to-end CLI runs on deliberately small problems."""

import csv
import json
import math

import numpy as np
import pytest

from hyperbem.cli import emit_examples, main
from hyperbem.config import parse_config

TINY = """
geometry.kind = ellipse
geometry.a = 2.0
geometry.b = 1.0
medium1.eps1 = 1+0.02i
medium1.eps2 = -2+0.02i
medium2.eps1 = 1+0i
medium2.eps2 = 1+0i
problem.k0 = 1.0
source.domain = 1
source.x = 0.0
source.y = 0.0
source.amplitude = -1+0i
adapt.m0 = 16
adapt.levels = 2
quadrature.rel_tol = 1e-6
reference.m_ref = 64
grid.xmin = -3.0
grid.xmax = 3.0
grid.ymin = -2.0
grid.ymax = 2.0
grid.nx = 12
grid.ny = 8
"""


def _read_csv(path):
    with open(path) as f:
        reader = csv.reader(f)
        header = next(reader)
        rows = list(reader)
    return header, rows


@pytest.fixture(scope="module")
def tiny_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("tiny_out")
    cfg_path = out / "tiny.cfg"
    cfg_path.write_text(TINY + f"output.dir = {out / 'run'}\n")
    rc = main(["run", str(cfg_path), "--serial"])
    assert rc == 0
    return out / "run"


def test_run_writes_all_artifacts(tiny_run):
    names = {p.name for p in tiny_run.iterdir()}
    assert {"levels.csv", "trace_final.csv", "reference_trace.csv",
            "mesh_final.csv", "field_real.csv", "field_imag.csv",
            "run_manifest.json"} <= names


def test_levels_csv_contents(tiny_run):
    header, rows = _read_csv(tiny_run / "levels.csv")
    assert header == ["level", "M", "h_max", "h_min", "eta_tilde",
                      "marked", "e1_hat", "e2_hat"]
    assert len(rows) == 2
    assert [int(r[0]) for r in rows] == [0, 1]
    assert int(rows[0][1]) == 16
    assert int(rows[1][1]) > 16
    for r in rows:
        assert float(r[4]) > 0.0
        assert math.isfinite(float(r[6])) and float(r[6]) > 0.0
        assert math.isfinite(float(r[7])) and float(r[7]) > 0.0


def test_trace_csv_schema(tiny_run):
    for name in ("trace_final.csv", "reference_trace.csv"):
        header, rows = _read_csv(tiny_run / name)
        assert header == ["t", "s_arclength", "re_phi1", "im_phi1",
                          "re_phi2", "im_phi2"]
        t = np.array([float(r[0]) for r in rows])
        s = np.array([float(r[1]) for r in rows])
        assert np.all(np.diff(t) > 0)
        assert np.all(np.diff(s) > 0)
    assert len(_read_csv(tiny_run / "reference_trace.csv")[1]) == 64


def test_field_csv_covers_grid_with_mask(tiny_run):
    header, rows = _read_csv(tiny_run / "field_real.csv")
    assert header == ["x", "y", "value", "domain_id"]
    assert len(rows) == 12 * 8
    values = [r[2] for r in rows]
    assert any(v == "nan" for v in values)
    finite = [float(v) for v in values if v != "nan"]
    assert finite and all(math.isfinite(v) for v in finite)
    assert {r[3] for r in rows} <= {"1", "2"}


def test_manifest_records_parameters(tiny_run):
    manifest = json.loads((tiny_run / "run_manifest.json").read_text())
    assert float(manifest["parameters"]["problem.k0"]) == 1.0
    assert manifest["defaulted"]["adapt.gamma"] is True
    assert manifest["defaulted"]["adapt.m0"] is False
    assert manifest["serial"] is True
    assert manifest["levels_run"] == 2
    assert manifest["reference_m"] == 64


def test_run_rejects_source_on_interface(tmp_path):
    bad = TINY.replace("source.x = 0.0", "source.x = 2.0")
    p = tmp_path / "bad.cfg"
    p.write_text(bad + f"output.dir = {tmp_path / 'out'}\n")
    assert main(["run", str(p)]) == 2


def test_run_rejects_unknown_key(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text(TINY + "mystery.key = 1\n")
    assert main(["run", str(p)]) == 2


def test_run_rejects_missing_file(tmp_path):
    assert main(["run", str(tmp_path / "absent.cfg")]) == 2


def test_emit_examples_round_trip(tmp_path):
    assert emit_examples(str(tmp_path)) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == [f"ex{i}.cfg" for i in range(1, 6)]
    for p in tmp_path.iterdir():
        cfg, _ = parse_config(p.read_text())
        cfg.validate()
    ex1, _ = parse_config((tmp_path / "ex1.cfg").read_text())
    assert ex1.m0 == 100 and ex1.levels == 5 and ex1.m_ref == 1400
    ex4, _ = parse_config((tmp_path / "ex4.cfg").read_text())
    assert ex4.k0 == pytest.approx(2 * np.pi) and ex4.m_ref == 1920


def test_levels_override(tmp_path):
    p = tmp_path / "one.cfg"
    p.write_text(TINY + f"output.dir = {tmp_path / 'out'}\n")
    assert main(["run", str(p), "--serial", "--levels", "1",
                 "--out", str(tmp_path / "out1")]) == 0
    _, rows = _read_csv(tmp_path / "out1" / "levels.csv")
    assert len(rows) == 1
