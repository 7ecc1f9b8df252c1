"""CSV export of collocation sets, linear systems and error reports.

Raw arrays are written with 17 significant digits so that a float64 value
survives a round trip exactly.  Report rows format metrics in scientific
notation with the same precision and wall times with 4 decimals.
"""
from __future__ import annotations

import csv
import io
import math

import numpy as np

from .sampling import CollocationSet

REPORT_COLUMNS = (
    "problem", "arch", "p", "M", "seed", "L_inf", "L_2", "time_s",
    "rank", "residual", "picard_iters", "btm_blocks", "error",
)
SWEEP_COLUMNS = REPORT_COLUMNS[:-1] + ("table", "reference_L_inf", "error")

_METRICS = {"L_inf", "L_2", "residual", "reference_L_inf"}


def format_metric(value) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return f"{float(value):.16e}"


def format_seconds(value) -> str:
    return "" if value is None else f"{float(value):.4f}"


def format_row(row: dict, columns=REPORT_COLUMNS) -> list:
    out = []
    for col in columns:
        v = row.get(col)
        if col in _METRICS:
            out.append(format_metric(v))
        elif col == "time_s":
            out.append(format_seconds(v))
        else:
            out.append("" if v is None else str(v))
    return out


def write_report(rows, stream, columns=REPORT_COLUMNS):
    """Write header plus one line per row dict; missing cells stay empty."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(format_row(row, columns))


def read_report(stream):
    return list(csv.DictReader(stream))


def _savetxt(path_or_stream, array, header):
    np.savetxt(path_or_stream, array, fmt="%.17g", delimiter=",", header=header, comments="", encoding="utf-8")


def collocation_to_csv(colloc: CollocationSet, path_or_stream):
    """Columns ``role, x0, .., x{d-1}``; roles are interior, boundary, initial."""
    pts = colloc.points
    roles = colloc.roles
    header = ",".join(["role"] + [f"x{i}" for i in range(pts.shape[1])])
    buf = io.StringIO()
    buf.write(header + "\n")
    for role, row in zip(roles, pts):
        buf.write(role + "," + ",".join(f"{v:.17g}" for v in row) + "\n")
    _write_text(path_or_stream, buf.getvalue())


def collocation_from_csv(path_or_stream) -> CollocationSet:
    text = _read_text(path_or_stream)
    rows = list(csv.reader(io.StringIO(text)))
    d = len(rows[0]) - 1
    groups = {"interior": [], "boundary": [], "initial": []}
    for r in rows[1:]:
        groups[r[0]].append([float(v) for v in r[1:]])
    arrays = {k: np.array(v, dtype=np.float64).reshape(-1, d) for k, v in groups.items()}
    return CollocationSet(arrays["interior"], arrays["boundary"], arrays["initial"])


def system_to_csv(A, F, path_or_stream):
    """One line per row: ``F, A_0, .., A_{M-1}``."""
    A = np.asarray(A, dtype=np.float64)
    F = np.asarray(F, dtype=np.float64).reshape(-1, 1)
    header = ",".join(["F"] + [f"A_{j}" for j in range(A.shape[1])])
    _savetxt(path_or_stream, np.hstack([F, A]), header)


def system_from_csv(path_or_stream):
    data = np.loadtxt(path_or_stream, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 1:], data[:, 0]


def _write_text(path_or_stream, text):
    if hasattr(path_or_stream, "write"):
        path_or_stream.write(text)
    else:
        with open(path_or_stream, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _read_text(path_or_stream):
    if hasattr(path_or_stream, "read"):
        return path_or_stream.read()
    with open(path_or_stream, encoding="utf-8") as fh:
        return fh.read()
