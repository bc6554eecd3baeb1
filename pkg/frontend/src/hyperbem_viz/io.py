"""Schema-checked loading of the solver's CSV artifacts.

Each artifact kind is identified by its header, so callers can hand the CLI a
bag of paths and let the loader sort out which file plays which role.  All
numeric columns come back as float arrays; missing values ("nan") stay NaN.
"""

import csv

import numpy as np

TRACE_COLUMNS = ["t", "s_arclength", "re_phi1", "im_phi1", "re_phi2", "im_phi2"]
FIELD_COLUMNS = ["x", "y", "value", "domain_id"]
LEVELS_COLUMNS = ["level", "M", "h_max", "h_min", "eta_tilde", "marked",
                  "e1_hat", "e2_hat"]
MESH_COLUMNS = ["element_id", "t_start", "t_end", "x_start", "y_start",
                "x_end", "y_end", "length", "nu_x", "nu_y", "level"]

_SCHEMAS = {
    "trace": TRACE_COLUMNS,
    "field": FIELD_COLUMNS,
    "levels": LEVELS_COLUMNS,
    "mesh": MESH_COLUMNS,
}


class SchemaError(Exception):
    """A CSV file does not match any known artifact schema."""


def _read_table(path):
    with open(path, newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, no header row")
        rows = list(reader)
    return [h.strip() for h in header], rows


def classify(path):
    """Return the artifact kind of ``path`` by matching its header.

    Raises SchemaError with a column diagnostic when nothing matches.
    """
    header, _ = _read_table(path)
    for kind, cols in _SCHEMAS.items():
        if header == cols:
            return kind
    lines = [f"{path}: header {header} matches no known artifact schema"]
    for kind, cols in _SCHEMAS.items():
        missing = [c for c in cols if c not in header]
        extra = [c for c in header if c not in cols]
        lines.append(f"  as {kind}: missing columns {missing}, "
                     f"unexpected columns {extra}")
    raise SchemaError("\n".join(lines))


def load_csv(path, expect=None):
    """Load an artifact CSV into a dict of named float arrays.

    ``expect`` pins the artifact kind; a mismatch raises SchemaError naming
    the offending columns.  Returns (kind, columns dict).
    """
    header, rows = _read_table(path)
    kind = classify(path)
    if expect is not None and kind != expect:
        cols = _SCHEMAS[expect]
        missing = [c for c in cols if c not in header]
        extra = [c for c in header if c not in cols]
        raise SchemaError(
            f"{path}: expected a {expect} file with columns {cols}; "
            f"missing {missing}, unexpected {extra}")
    if any(len(r) != len(header) for r in rows):
        bad = next(i for i, r in enumerate(rows) if len(r) != len(header))
        raise SchemaError(f"{path}: row {bad + 2} has {len(rows[bad])} fields, "
                          f"header has {len(header)}")
    data = np.full((len(rows), len(header)), np.nan)
    for i, row in enumerate(rows):
        for j, cell in enumerate(row):
            data[i, j] = float(cell)
    return kind, {name: data[:, j] for j, name in enumerate(header)}
