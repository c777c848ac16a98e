"""
Snapshot files, trajectory export and atomic JSON writes.

A snapshot is one JSON header line

    {"lambda": ..., "M": ..., "beta": ..., "gamma": ..., "mu": ..., "t": ..., "realness": ...}

followed by CSV lines ``m,re,im`` for m = -M..M with 17 significant digits.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path
from typing import Any

import numpy as np

from .integrator import Trajectory
from .spectral import SpectralField, TorusGrid, hermitian_part
from .symbols import DispersionParams

_FMT = "{:.17g}"


def write_snapshot(path: str | os.PathLike, u: SpectralField, params: DispersionParams, t: float) -> None:
    header = {
        "lambda": u.grid.lam,
        "M": u.grid.M,
        "beta": params.beta,
        "gamma": params.gamma,
        "mu": params.mu,
        "t": t,
        "realness": u.realness,
    }
    lines = [json.dumps(header, sort_keys=True)]
    for m, c in zip(u.grid.indices, u.coeffs):
        lines.append(f"{m},{_FMT.format(c.real)},{_FMT.format(c.imag)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_snapshot(path: str | os.PathLike, hermitian_tol: float = 1e-12) -> tuple[SpectralField, dict]:
    """Parse a snapshot; raises ValueError if a real field is not Hermitian."""
    with open(path) as fh:
        header = json.loads(fh.readline())
        rows = list(csv.reader(fh))
    M = int(header["M"])
    if len(rows) != 2 * M + 1:
        raise ValueError(f"expected {2 * M + 1} coefficient rows, found {len(rows)}")
    idx = np.array([int(r[0]) for r in rows])
    if not np.array_equal(idx, np.arange(-M, M + 1)):
        raise ValueError("coefficient rows must list m = -M..M in order")
    c = np.array([float(r[1]) + 1j * float(r[2]) for r in rows])
    realness = bool(header["realness"])
    if realness:
        defect = np.max(np.abs(c - hermitian_part(c)), initial=0.0)
        if defect > hermitian_tol * max(1.0, float(np.max(np.abs(c), initial=0.0))):
            raise ValueError(f"field marked real but Hermitian defect is {defect:.3e}")
    grid = TorusGrid(float(header["lambda"]), M)
    return SpectralField(grid, c, realness), header


def export_trajectory(directory: str | os.PathLike, traj: Trajectory) -> list[str]:
    """Write snapshot_XXXXX.csv files plus diagnostics.csv; returns the file names."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    names = []
    params = traj.form.params
    for j in range(len(traj)):
        name = f"snapshot_{j:05d}.csv"
        write_snapshot(d / name, traj.field_at(j), params, float(traj.times[j]))
        names.append(name)
    write_diagnostics_csv(d / "diagnostics.csv", traj)
    names.append("diagnostics.csv")
    return names


def write_diagnostics_csv(path: str | os.PathLike, traj: Trajectory) -> None:
    diag = traj.diagnostics
    rows = ["t,E,M,H,smoothing"]
    for j, t in enumerate(traj.times):
        vals = [t] + [diag[k][j] for k in ("E", "M", "H", "smoothing")]
        rows.append(",".join(_FMT.format(float(v)) for v in vals))
    atomic_write_text(path, "\n".join(rows) + "\n")


def write_csv(path: str | os.PathLike, header: list[str], rows: list[list[Any]]) -> None:
    out = [",".join(header)]
    for r in rows:
        out.append(",".join(_FMT.format(v) if isinstance(v, float) else str(v) for v in r))
    atomic_write_text(path, "\n".join(out) + "\n")


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    """Write through a temporary file in the same directory and rename into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_json(path: str | os.PathLike, obj: Any) -> None:
    atomic_write_text(path, json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n")


def to_jsonable(obj: Any) -> Any:
    """Recursively convert numpy scalars/arrays and tuples into JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj
