"""Readers for the solver's documented output schemas.

Only the file formats are shared with the solver package; nothing here
imports solver internals.
"""

import csv
from pathlib import Path

import numpy as np

ENERGY_COLUMNS = ["n", "t", "E", "E_physical", "q", "S", "dissipation_residual"]
TABLE_COLUMNS = [
    "tau",
    "eu_L2", "eu_L2_rate", "eu_H1", "eu_H1_rate", "ep_L2", "ep_L2_rate",
    "ew_L2", "ew_L2_rate", "ew_H1", "ew_H1_rate", "eq", "eq_rate",
]
ERROR_COLUMNS = ["eu_L2", "eu_H1", "ep_L2", "ew_L2", "ew_H1", "eq"]


class SchemaError(ValueError):
    """Input file does not match the documented CSV/VTK schema."""


def _check_header(header, expected, path):
    if header != expected:
        missing = [c for c in expected if c not in header]
        extra = [c for c in header if c not in expected]
        detail = []
        if missing:
            detail.append(f"missing columns {missing}")
        if extra:
            detail.append(f"unexpected columns {extra}")
        if not detail:
            detail.append("columns out of order")
        raise SchemaError(f"{path}: {'; '.join(detail)}")


def read_energy_csv(path):
    """Energy series -> dict of float arrays (S and dissipation_residual hold
    NaN where the file leaves them blank, i.e. at step 0)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"{path}: empty file")
    _check_header(rows[0], ENERGY_COLUMNS, path)
    if len(rows) == 1:
        raise SchemaError(f"{path}: no data rows")
    data = {c: [] for c in ENERGY_COLUMNS}
    for row in rows[1:]:
        if len(row) != len(ENERGY_COLUMNS):
            raise SchemaError(f"{path}: row has {len(row)} fields")
        for c, v in zip(ENERGY_COLUMNS, row):
            data[c].append(float(v) if v != "" else np.nan)
    return {c: np.asarray(v) for c, v in data.items()}


def read_table_csv(path):
    """Convergence table -> dict of float arrays keyed by column (rates hold
    NaN on the first row). Error values must be nonnegative."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"{path}: empty file")
    _check_header(rows[0], TABLE_COLUMNS, path)
    if len(rows) == 1:
        raise SchemaError(f"{path}: no data rows")
    data = {c: [] for c in TABLE_COLUMNS}
    for row in rows[1:]:
        if len(row) != len(TABLE_COLUMNS):
            raise SchemaError(f"{path}: row has {len(row)} fields")
        for c, v in zip(TABLE_COLUMNS, row):
            data[c].append(float(v) if v != "" else np.nan)
    out = {c: np.asarray(v) for c, v in data.items()}
    for c in ERROR_COLUMNS:
        if np.any(out[c] < 0):
            raise SchemaError(f"{path}: negative value in column {c}")
    return out


def read_vtk(path):
    """Minimal legacy-ASCII-VTK reader for the solver's snapshots.

    Returns (points (n, 2), triangles (m, 3), scalars {name: (n,) array}).
    """
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("# vtk DataFile"):
        raise SchemaError(f"{path}: not a legacy VTK file")
    points = triangles = None
    scalars = {}
    i = 0
    try:
        while i < len(lines):
            parts = lines[i].split()
            if parts[:1] == ["POINTS"]:
                n = int(parts[1])
                pts = [list(map(float, lines[i + 1 + k].split())) for k in range(n)]
                points = np.asarray(pts)[:, :2]
                i += n + 1
            elif parts[:1] == ["CELLS"]:
                m = int(parts[1])
                cells = [list(map(int, lines[i + 1 + k].split())) for k in range(m)]
                if any(c[0] != 3 for c in cells):
                    raise SchemaError(f"{path}: non-triangle cell")
                triangles = np.asarray(cells)[:, 1:]
                i += m + 1
            elif parts[:1] == ["SCALARS"]:
                name = parts[1]
                n = points.shape[0]
                # next line is the LOOKUP_TABLE directive
                vals = [float(lines[i + 2 + k]) for k in range(n)]
                scalars[name] = np.asarray(vals)
                i += n + 2
            elif parts[:1] == ["VECTORS"]:
                i += points.shape[0] + 1
            else:
                i += 1
    except (ValueError, IndexError, AttributeError) as exc:
        raise SchemaError(f"{path}: unreadable VTK ({exc})") from exc
    if points is None or triangles is None:
        raise SchemaError(f"{path}: missing POINTS or CELLS section")
    return points, triangles, scalars
