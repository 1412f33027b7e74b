"""Delimited output: trajectory/field CSV files and JSON reports.

Floats are written with ``repr``, the shortest decimal string that parses
back to the same double, so repeated runs produce byte-identical files.
"""

from __future__ import annotations

import io
import json
import sys

import numpy as np

from .config import CSV_HEADER
from .propagate import BlochTrajectory


def _open_target(path):
    if path is None or path == "-":
        return sys.stdout, False
    if path == "":
        raise FileNotFoundError("empty output path")
    return open(path, "w", encoding="utf-8", newline="\n"), True


def format_rows(header: str, columns) -> str:
    cols = [np.asarray(c, dtype=float) for c in columns]
    buf = io.StringIO()
    buf.write(header + "\n")
    for row in zip(*cols):
        buf.write(",".join(repr(float(x)) for x in row))
        buf.write("\n")
    return buf.getvalue()


def write_text(path, text: str) -> None:
    fh, owned = _open_target(path)
    try:
        fh.write(text)
    finally:
        if owned:
            fh.close()


def write_records(path, times, n, b) -> None:
    """One ``t,n1,n2,n3,b1,b2,b3`` row per node."""
    n, b = np.asarray(n, dtype=float), np.asarray(b, dtype=float)
    write_text(path, format_rows(CSV_HEADER, [times, *n.T, *b.T]))


def emit_plot_data(traj: BlochTrajectory, path, field) -> None:
    """Write ``traj`` with the driving field sampled on its nodes."""
    write_records(path, traj.times, traj.vectors, field(traj.times))


def write_report(path, report: dict) -> None:
    write_text(path, json.dumps(report, indent=2, sort_keys=True) + "\n")
