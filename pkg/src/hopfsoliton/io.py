"""CSV and JSON readers and writers for profiles, densities and field dumps.

CSV files have a header row, ``,`` separators, ``\\n`` line endings, no
quoting and 17 significant digits.
"""

from __future__ import annotations

import json
import warnings
from pathlib import Path

import numpy as np

from .errors import ProfileFormatError
from .profiles import RadialProfile

FLOAT_FMT = "%.17g"


def write_csv(path, header, columns):
    """Write equal-length columns under a comma-separated header."""
    path = Path(path)
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        np.savetxt(fh, data, fmt=FLOAT_FMT, delimiter=",", newline="\n")
    return path


def read_csv(path):
    """Return (header, data) with ``data`` of shape (rows, columns)."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return header, data


def write_profile_csv(path, prof):
    return write_csv(path, ["r", "f", "g"], [prof.r, prof.f_nodes, prof.g_nodes])


def read_profile_csv(path):
    """Load an ``r,f,g`` profile; malformed files raise :class:`ProfileFormatError`."""
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            header, data = read_csv(path)
    except (OSError, ValueError) as exc:
        raise ProfileFormatError(f"cannot read profile {path}: {exc}") from exc
    if header != ["r", "f", "g"]:
        raise ProfileFormatError(f"expected header r,f,g in {path}, got {','.join(header)}")
    if data.shape[1] != 3:
        raise ProfileFormatError(f"expected 3 columns in {path}")
    try:
        return RadialProfile(data[:, 0], data[:, 1], data[:, 2])
    except ValueError as exc:
        raise ProfileFormatError(f"invalid profile in {path}: {exc}") from exc


def write_density_csv(path, r, kinetic, gauge, potential):
    total = kinetic + gauge + potential
    return write_csv(path, ["r", "kinetic", "gauge", "potential", "total"], [r, kinetic, gauge, potential, total])


FIELD_HEADER = ["x1", "x2", "x3", "x4", "phi1", "phi2", "phi3"] + [
    f"A{mu}{a}" for mu in range(1, 5) for a in range(1, 4)
]


def write_field_csv(path, x, phi, A):
    """One row per point: coordinates, phi^a and A^a_mu (column ``A<mu><a>``)."""
    x = np.asarray(x, dtype=float).reshape(-1, 4)
    phi = np.asarray(phi, dtype=float).reshape(-1, 3)
    A = np.asarray(A, dtype=float).reshape(-1, 12)
    return write_csv(path, FIELD_HEADER, list(x.T) + list(phi.T) + list(A.T))


def write_json(path, payload):
    path = Path(path)
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")
    return path


def read_json(path):
    with open(path) as fh:
        return json.load(fh)
