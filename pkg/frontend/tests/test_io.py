import numpy as np
import pytest

from hyperbem_viz.io import SchemaError, classify, load_csv


def test_classify_recognizes_every_artifact(trace_csv, field_csv, mesh_csv,
                                            levels_csv):
    assert classify(trace_csv) == "trace"
    assert classify(field_csv) == "field"
    assert classify(mesh_csv) == "mesh"
    assert classify(levels_csv) == "levels"


def test_load_returns_named_float_columns(trace_csv):
    kind, cols = load_csv(trace_csv)
    assert kind == "trace"
    assert set(cols) == {"t", "s_arclength", "re_phi1", "im_phi1",
                         "re_phi2", "im_phi2"}
    assert cols["t"].shape == (40,)
    assert np.all(np.diff(cols["t"]) > 0)


def test_nan_cells_survive_loading(masked_field_csv):
    _, cols = load_csv(masked_field_csv)
    assert np.all(np.isnan(cols["value"]))
    assert np.all(np.isfinite(cols["x"]))


def test_unknown_header_names_columns(tmp_path):
    path = tmp_path / "odd.csv"
    path.write_text("t,s_arclength,re_phi1\n0,0,0\n")
    with pytest.raises(SchemaError) as err:
        classify(path)
    assert "im_phi1" in str(err.value)
    assert str(path) in str(err.value)


def test_expect_mismatch_is_flagged(trace_csv):
    with pytest.raises(SchemaError) as err:
        load_csv(trace_csv, expect="field")
    assert "domain_id" in str(err.value)


def test_ragged_row_reports_line_number(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y,value,domain_id\n0,0,1,1\n0,1,2\n")
    with pytest.raises(SchemaError, match="row 3"):
        load_csv(path)


def test_empty_file_is_rejected(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(SchemaError, match="empty"):
        classify(path)
