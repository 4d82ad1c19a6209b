"""File formats: WIGM binary matrices and CSV tables.

WIGM layout (little-endian): 4-byte magic ``b"WIGM"``, u32 version, u64 N,
then ``N*N`` float64 values in row-major order.
"""

import csv
import json
import struct
from pathlib import Path

import numpy as np

from .errors import DomainError

MAGIC = b"WIGM"
VERSION = 1
_HEADER = struct.Struct("<4sIQ")


def write_wigm(path, matrix) -> None:
    a = np.asarray(matrix, dtype="<f8")
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"WIGM stores square matrices, got shape {a.shape}")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, a.shape[0]))
        fh.write(np.ascontiguousarray(a).tobytes())


def read_wigm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise DomainError("truncated WIGM header")
    magic, version, n = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise DomainError(f"bad magic {magic!r}")
    if version != VERSION:
        raise DomainError(f"unsupported WIGM version {version}")
    body = data[_HEADER.size:]
    if len(body) != 8 * n * n:
        raise DomainError(f"WIGM body has {len(body)} bytes, expected {8 * n * n}")
    return np.frombuffer(body, dtype="<f8").reshape(n, n).astype(float)


def fmt(x) -> str:
    """Round-trip float formatting (17 significant digits); ints stay ints."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if not isinstance(v, str) else v for v in row])


def write_columns(path, columns: dict) -> None:
    keys = list(columns)
    cols = [np.asarray(columns[k]) for k in keys]
    write_csv(path, keys, zip(*cols))


def read_csv(path):
    """Header and rows, with every numeric cell parsed as float."""
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = []
        for row in r:
            parsed = []
            for cell in row:
                try:
                    parsed.append(float(cell))
                except ValueError:
                    parsed.append(cell)
            rows.append(parsed)
    return header, rows


def write_matrix_csv(path, matrix) -> None:
    a = np.asarray(matrix, dtype=float)
    if a.shape[0] > 100:
        raise DomainError("CSV matrix export is limited to N <= 100")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for row in a:
            w.writerow([fmt(v) for v in row])


def write_spectrum_csv(path, eigenvalues) -> None:
    lam = np.asarray(eigenvalues, dtype=float)
    write_csv(path, ["index", "eigenvalue"], ((i, v) for i, v in enumerate(lam)))


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
