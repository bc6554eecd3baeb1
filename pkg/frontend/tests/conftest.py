"""Synthetic artifact CSVs matching the solver's documented output schemas."""

import numpy as np
import pytest


def _write(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


@pytest.fixture
def trace_csv(tmp_path):
    t = np.linspace(0.0, 2 * np.pi, 40, endpoint=False)
    rows = np.column_stack([t, 1.5 * t, np.cos(t), np.sin(t),
                            np.cos(2 * t), np.sin(2 * t)])
    path = tmp_path / "trace_final.csv"
    _write(path, ["t", "s_arclength", "re_phi1", "im_phi1",
                  "re_phi2", "im_phi2"], rows)
    return path


@pytest.fixture
def field_csv(tmp_path):
    xs, ys = np.meshgrid(np.linspace(-2, 2, 12), np.linspace(-2, 2, 10))
    x = xs.ravel()
    y = ys.ravel()
    value = np.where(x ** 2 + y ** 2 < 0.1, np.nan, np.sin(x) * np.cos(y))
    domain = np.where(x ** 2 / 4 + y ** 2 < 1.0, 1, 2)
    rows = [(f"{a}", f"{b}", "nan" if np.isnan(v) else f"{v}", f"{d}")
            for a, b, v, d in zip(x, y, value, domain)]
    path = tmp_path / "field_real.csv"
    _write(path, ["x", "y", "value", "domain_id"], rows)
    return path


@pytest.fixture
def masked_field_csv(tmp_path):
    xs, ys = np.meshgrid(np.linspace(-1, 1, 6), np.linspace(-1, 1, 5))
    rows = [(f"{a}", f"{b}", "nan", "1") for a, b in zip(xs.ravel(), ys.ravel())]
    path = tmp_path / "field_masked.csv"
    _write(path, ["x", "y", "value", "domain_id"], rows)
    return path


@pytest.fixture
def mesh_csv(tmp_path):
    t = np.linspace(0.0, 2 * np.pi, 24, endpoint=False)
    t_end = np.roll(t, -1)
    t_end[-1] = 2 * np.pi
    x0, y0 = 2 * np.cos(t), np.sin(t)
    x1, y1 = 2 * np.cos(t_end), np.sin(t_end)
    lengths = np.hypot(x1 - x0, y1 - y0)
    rows = np.column_stack([np.arange(24), t, t_end, x0, y0, x1, y1,
                            lengths, np.cos(t), np.sin(t),
                            np.full(24, 3)])
    path = tmp_path / "mesh_final.csv"
    _write(path, ["element_id", "t_start", "t_end", "x_start", "y_start",
                  "x_end", "y_end", "length", "nu_x", "nu_y", "level"], rows)
    return path


@pytest.fixture
def levels_csv(tmp_path):
    rows = [(lvl, 100 * 2 ** lvl, 0.2 / 2 ** lvl, 0.1 / 2 ** lvl,
             0.5 / 2 ** lvl, 30, 0.01 / 2 ** lvl, 0.2 / 2 ** lvl)
            for lvl in range(5)]
    path = tmp_path / "levels.csv"
    _write(path, ["level", "M", "h_max", "h_min", "eta_tilde", "marked",
                  "e1_hat", "e2_hat"], rows)
    return path
