"""Deterministic writers for error tables, energy series, and field
snapshots. All quantitative output is plain CSV; snapshots are legacy
ASCII VTK so they load in standard viewers."""

import numpy as np

TABLE_HEADER = ("tau,eu_L2,eu_L2_rate,eu_H1,eu_H1_rate,ep_L2,ep_L2_rate,"
                "ew_L2,ew_L2_rate,ew_H1,ew_H1_rate,eq,eq_rate")

SERIES_HEADER = "n,t,E,E_physical,q,S,dissipation_residual"


def sci(x):
    """Scientific notation with a 6-digit mantissa and bare exponent,
    e.g. 2.470000e-3; zero prints as 0.000000e0. Round-trips via float()."""
    if x == 0:
        return "0.000000e0"
    s = f"{x:.6e}"
    mant, exp = s.split("e")
    return f"{mant}e{int(exp)}"


def write_csv_table(report, path):
    """Error table: one row per time step, rates blank on the first row."""
    if not report.rows:
        raise ValueError("empty error report")
    rates = report.rates()
    lines = [TABLE_HEADER]
    for tau, row, rate in zip(report.taus, report.rows, rates):
        cells = [sci(tau)]
        for col in report.COLUMNS:
            cells.append(sci(row[col]))
            r = rate[col]
            cells.append("" if r is None else f"{r:.2f}")
        lines.append(",".join(cells))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_energy_series(series, path):
    """Energy series: one row per step including step 0 (S and residual are
    empty there)."""
    lines = [SERIES_HEADER]
    for rec in series.records:
        s = "" if rec["S"] is None else sci(rec["S"])
        r = "" if rec["dissipation_residual"] is None else sci(rec["dissipation_residual"])
        lines.append(
            f"{rec['n']},{sci(rec['t'])},{sci(rec['E'])},"
            f"{sci(rec['E_physical'])},{sci(rec['q'])},{s},{r}"
        )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_vtk_field(fields, path, names=None):
    """Legacy ASCII VTK unstructured grid with triangle cells.

    fields: list of Field/ScalarField on the same mesh; P2 fields are
    emitted at the vertices only (edge-midpoint dofs dropped).
    """
    if not fields:
        raise ValueError("no fields to write")
    mesh = fields[0].space.mesh
    for f in fields[1:]:
        if f.space.mesh is not mesh:
            raise ValueError("fields live on different meshes")
    if names is None:
        names = [f"field{i}" for i in range(len(fields))]
    nv = mesh.num_vertices
    nt = mesh.num_triangles
    lines = [
        "# vtk DataFile Version 3.0",
        "mns snapshot",
        "ASCII",
        "DATASET UNSTRUCTURED_GRID",
        f"POINTS {nv} double",
    ]
    for x, y in mesh.vertices:
        lines.append(f"{x:.12g} {y:.12g} 0")
    lines.append(f"CELLS {nt} {4 * nt}")
    for tri in mesh.triangles:
        lines.append(f"3 {tri[0]} {tri[1]} {tri[2]}")
    lines.append(f"CELL_TYPES {nt}")
    lines.extend(["5"] * nt)
    lines.append(f"POINT_DATA {nv}")
    for field, name in zip(fields, names):
        if field.space.components == 2:
            vals = field.coeffs.reshape(-1, 2)[:nv]
            lines.append(f"VECTORS {name} double")
            for vx, vy in vals:
                lines.append(f"{vx:.12g} {vy:.12g} 0")
        else:
            vals = np.asarray(field.coeffs)[:nv]
            lines.append(f"SCALARS {name} double 1")
            lines.append("LOOKUP_TABLE default")
            for v in vals:
                lines.append(f"{v:.12g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
