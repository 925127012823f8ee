"""Diagnostics series and snapshot files.

Binary snapshot layout (little endian): ``b"WLAB0001"``, ``nx`` and ``np`` as
uint64, 8 zero bytes, then ``nx*np`` float64 values row-major with p fastest.
"""
from __future__ import annotations

import csv
import os

import numpy as np

from .hydrodynamics import HydroFields
from .state import WignerState

MAGIC = b"WLAB0001"
HEADER_SIZE = 32
SERIES_HEADER = ("t", "norm", "energy", "purity", "min_eig", "diag_dist",
                 "band_inner", "band_mid", "band_outer")
HYDRO_HEADER = ("x", "n", "pbar", "sigma2", "W", "I", "Q")


def fmt17(v) -> str:
    return "%.17g" % v


def _open_for_write(path, mode):
    try:
        return open(path, mode, **({} if "b" in mode else {"newline": "", "encoding": "utf-8"}))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def write_series(reports, path):
    """One CSV row per :class:`~wignerlab.diagnostics.DivergenceReport`."""
    with _open_for_write(path, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SERIES_HEADER)
        for rep in reports:
            w.writerow([fmt17(v) for v in rep.row()])


def read_series(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if tuple(rows[0]) != SERIES_HEADER:
        raise ValueError(f"{path}: unexpected header {rows[0]}")
    return np.array([[float(v) for v in r] for r in rows[1:]], dtype=float).reshape(-1, len(SERIES_HEADER))


def write_snapshot(obj, path, fmt="binary"):
    """Write a Wigner array (``binary`` or ``csv``) or hydro fields (csv)."""
    if isinstance(obj, HydroFields):
        return _write_hydro(obj, path)
    f = obj.f if isinstance(obj, WignerState) else np.asarray(obj)
    if fmt == "binary":
        return _write_binary(np.asarray(f, dtype="<f8"), path)
    if fmt == "csv":
        if not isinstance(obj, WignerState):
            raise TypeError("CSV snapshots need a WignerState for the x and p axes")
        return _write_csv(obj, path)
    raise ValueError(f"unknown snapshot format {fmt!r}")


def _write_binary(f, path):
    nx, np_ = f.shape
    header = MAGIC + np.array([nx, np_], dtype="<u8").tobytes() + bytes(8)
    with _open_for_write(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(f).tobytes(order="C"))


def read_snapshot(path) -> np.ndarray:
    with open(path, "rb") as fh:
        header = fh.read(HEADER_SIZE)
        if len(header) != HEADER_SIZE or header[:8] != MAGIC:
            raise ValueError(f"{path}: not a WLAB0001 snapshot")
        nx, np_ = np.frombuffer(header[8:24], dtype="<u8")
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != nx * np_:
        raise ValueError(f"{path}: expected {nx * np_} values, found {data.size}")
    return data.reshape(int(nx), int(np_)).astype(float)


def _write_csv(wig, path):
    g = wig.grid
    with _open_for_write(path, "w") as fh:
        fh.write("x,p,F\n")
        xs = [fmt17(v) for v in g.x]
        ps = [fmt17(v) for v in g.p]
        for i, row in enumerate(wig.f):
            fh.write("".join(f"{xs[i]},{ps[j]},{fmt17(v)}\n" for j, v in enumerate(row)))


def _write_hydro(fields, path, x=None):
    n = fields.n.size
    cols = [x if x is not None else np.full(n, np.nan)] + [
        getattr(fields, name) if getattr(fields, name) is not None else np.full(n, np.nan)
        for name in HYDRO_HEADER[1:]]
    with _open_for_write(path, "w") as fh:
        fh.write(",".join(HYDRO_HEADER) + "\n")
        for row in zip(*cols):
            fh.write(",".join(fmt17(v) for v in row) + "\n")


def write_hydro(fields, grid, path):
    _write_hydro(fields, path, x=grid.x)


def ensure_dir(path):
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {path}: {exc.strerror or exc}") from exc
