"""Writer (and self-check reader) for the engine's embedding tensor format.

Layout, little-endian: magic b"AALN", u32 version = 1, u32 rows, u32 cols,
u8 dtype (0 = float32), then row-major float32 payload. This file is the
wire contract with the alignment engine; the engine has its own independent
reader.

Writes are atomic (temp file + rename) so a concurrently running engine
never observes a partial tensor.
"""

from __future__ import annotations

import os
import struct
import tempfile
from pathlib import Path

import numpy as np

MAGIC = b"AALN"
VERSION = 1
DTYPE_FLOAT32 = 0

_HEADER = struct.Struct("<4sIIIB")


def write_tensor(path: str | Path, matrix: np.ndarray) -> None:
    matrix = np.asarray(matrix)
    if matrix.ndim != 2:
        raise ValueError(f"tensor must be 2-D, got shape {matrix.shape}")
    rows, cols = matrix.shape
    payload = np.ascontiguousarray(matrix, dtype="<f4").tobytes()
    header = _HEADER.pack(MAGIC, VERSION, rows, cols, DTYPE_FLOAT32)

    path = Path(path)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(header)
            fh.write(payload)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def read_tensor(path: str | Path) -> np.ndarray:
    blob = Path(path).read_bytes()
    magic, version, rows, cols, dtype = _HEADER.unpack_from(blob)
    if magic != MAGIC or version != VERSION or dtype != DTYPE_FLOAT32:
        raise ValueError(f"{path}: not a supported tensor file")
    if len(blob) != _HEADER.size + rows * cols * 4:
        raise ValueError(f"{path}: truncated payload")
    return np.frombuffer(blob, dtype="<f4", offset=_HEADER.size).reshape(rows, cols)


def unit_normalize(rows: np.ndarray) -> np.ndarray:
    """Unit L2 rows in float32; zero rows are rejected."""
    rows = np.asarray(rows, dtype=np.float64)
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise ValueError("cannot normalize a zero embedding row")
    return (rows / norms).astype(np.float32)
