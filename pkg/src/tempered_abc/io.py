"""CSV and plain-text table formats.

Every float is written with 17 significant digits, which round-trips
binary64 exactly. Lines end in LF.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np


def format_float(value) -> str:
    return f"{float(value):.17g}"


def write_history_csv(path, history) -> None:
    """Header row of x-nodes, then one row per time node."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([format_float(x) for x in history.x])
        for row in history.values:
            writer.writerow([format_float(v) for v in row])


def read_history_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`write_history_csv`: returns ``(x, values)``."""
    data = np.loadtxt(path, delimiter=",", ndmin=2)
    return data[0], data[1:]


def write_table(path, nodes, values) -> None:
    """Two-column whitespace table ``node value`` (test vectors)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="\n") as fh:
        for t, v in zip(nodes, values):
            fh.write(f"{format_float(t)} {format_float(v)}\n")


def read_table(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, ndmin=2)
    return data[:, 0], data[:, 1]
