"""Reading and writing datasets, matrices and traces.

CSV datasets
    Optional metadata lines ``#kind=raw|hist|sphere`` at the top, then a
    header row.  Columns named ``label`` and ``id`` are special; every other
    column is a numeric value.
Binary matrices
    ``b"SLRR"``, u32 rows, u32 cols (little endian), then rows*cols
    little-endian float64 values in row-major order.
"""
from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

from .pipeline import KINDS, Dataset

MAGIC = b"SLRR"
_HEADER = struct.Struct("<4sII")


def fmt(x) -> str:
    return format(float(x), ".17g")


def write_matrix_bin(path, M) -> None:
    M = np.ascontiguousarray(np.atleast_2d(np.asarray(M, dtype="<f8")))
    rows, cols = M.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, rows, cols))
        fh.write(M.tobytes(order="C"))


def read_matrix_bin(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError("file too short for an SLRR header")
    magic, rows, cols = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError("bad magic bytes; not an SLRR matrix file")
    payload = raw[_HEADER.size:]
    if len(payload) != rows * cols * 8:
        raise ValueError(f"payload holds {len(payload)} bytes, expected {rows * cols * 8}")
    return np.frombuffer(payload, dtype="<f8").reshape(rows, cols).astype(float)


def is_matrix_bin(path) -> bool:
    with open(path, "rb") as fh:
        return fh.read(4) == MAGIC


def _is_number(tok):
    try:
        float(tok)
    except ValueError:
        return False
    return True


def read_dataset(path, kind: str | None = None) -> Dataset:
    """Load a dataset from CSV or the binary matrix format.

    ``kind`` overrides any ``#kind=`` line in the file; the default is ``raw``.
    """
    path = Path(path)
    if is_matrix_bin(path):
        return Dataset(kind or "raw", read_matrix_bin(path))
    meta = {}
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec or not "".join(rec).strip():
                continue
            if rec[0].lstrip().startswith("#"):
                line = ",".join(rec).lstrip()[1:]
                if "=" in line:
                    key, val = line.split("=", 1)
                    meta[key.strip()] = val.strip()
                continue
            rows.append([t.strip() for t in rec])
    if not rows:
        raise ValueError(f"{path}: no data rows")
    header = None
    if not all(_is_number(t) for t in rows[0]):
        header, rows = rows[0], rows[1:]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    ncol = len(rows[0])
    header = header or [f"v{i}" for i in range(ncol)]
    if any(len(r) != len(header) for r in rows):
        raise ValueError(f"{path}: ragged rows")
    lab_col = header.index("label") if "label" in header else None
    id_col = header.index("id") if "id" in header else None
    value_cols = [i for i in range(len(header)) if i not in (lab_col, id_col)]
    values = np.array([[float(r[i]) for i in value_cols] for r in rows])
    labels = None if lab_col is None else np.array([int(float(r[lab_col])) for r in rows])
    ids = [r[id_col] for r in rows] if id_col is not None else []
    kind = kind or meta.get("kind", "raw")
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    return Dataset(kind, values, labels, ids)


def write_dataset(path, ds: Dataset) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"#kind={ds.kind}\n")
        w = csv.writer(fh, lineterminator="\n")
        cols = [f"v{i}" for i in range(ds.values.shape[1])]
        head = ["id"] + (["label"] if ds.labels is not None else []) + cols
        w.writerow(head)
        for i, row in enumerate(ds.values):
            lab = [str(int(ds.labels[i]))] if ds.labels is not None else []
            w.writerow([ds.ids[i]] + lab + [fmt(x) for x in row])


def write_matrix_csv(path, M) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in np.atleast_2d(M):
            w.writerow([fmt(x) for x in row])


def read_matrix_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)


def write_matrix(path, M) -> None:
    """Write as binary for ``.slrr``/``.bin`` suffixes, CSV otherwise."""
    if Path(path).suffix in (".slrr", ".bin"):
        write_matrix_bin(path, M)
    else:
        write_matrix_csv(path, M)


def write_trace(path, trace) -> None:
    with open(path, "w") as fh:
        for r in trace:
            fh.write(json.dumps({"iter": r.iter, "objective": r.objective,
                                 "violation": r.violation, "rank": r.rank,
                                 "beta": r.beta, "mu": r.mu}) + "\n")


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
