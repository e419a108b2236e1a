"""EMB1 embedding sidecar files.

Layout: 4 ASCII magic bytes "EMB1", then n_rows and dim as little-endian
uint32, then n_rows*dim IEEE-754 float32 values, little-endian, row-major.
Nothing follows the payload. The format is bit-exact: write(read(f))
reproduces f byte for byte, and read(write(m)) reproduces m value for value.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np

from .errors import BadMagic, InvalidMatrix, TruncatedFile, ZeroNormRow

MAGIC = b"EMB1"
_HEADER = struct.Struct("<4sII")


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Row-major matrix of caption (or summary) embeddings.

    values is float32, the storage precision; numeric consumers upcast to
    float64. Every row must be finite with strictly positive norm.
    """

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.ascontiguousarray(self.values, dtype=np.float32))
        validate_matrix(self.values)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def as_float64(self) -> np.ndarray:
        return self.values.astype(np.float64)


def validate_matrix(values: np.ndarray) -> None:
    if values.ndim != 2:
        raise InvalidMatrix(f"expected a 2-d matrix, got shape {values.shape}")
    n_rows, dim = values.shape
    if n_rows < 1 or dim < 1:
        raise InvalidMatrix(f"matrix must be at least 1x1, got {n_rows}x{dim}")
    if not np.all(np.isfinite(values)):
        raise InvalidMatrix("matrix contains NaN or Inf entries")
    norms = np.linalg.norm(values.astype(np.float64), axis=1)
    if np.any(norms == 0.0):
        bad = int(np.flatnonzero(norms == 0.0)[0])
        raise ZeroNormRow(f"row {bad} has zero norm")


def write_embeddings(matrix: EmbeddingMatrix | np.ndarray, path: str | os.PathLike) -> None:
    """Write matrix to path in EMB1 layout. Validates before touching disk."""
    if not isinstance(matrix, EmbeddingMatrix):
        matrix = EmbeddingMatrix(np.asarray(matrix))
    values = matrix.values
    header = _HEADER.pack(MAGIC, values.shape[0], values.shape[1])
    payload = values.astype("<f4", copy=False).tobytes(order="C")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def read_embeddings(path: str | os.PathLike) -> EmbeddingMatrix:
    """Read an EMB1 file, validating magic, size, and matrix invariants."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise InvalidMatrix(f"cannot read embedding file {path}: {exc}") from exc
    if len(raw) < 4 or raw[:4] != MAGIC:
        raise BadMagic(f"{path}: missing EMB1 magic")
    if len(raw) < _HEADER.size:
        raise TruncatedFile(f"{path}: header truncated")
    _, n_rows, dim = _HEADER.unpack_from(raw)
    expected = n_rows * dim * 4
    body = raw[_HEADER.size:]
    if len(body) < expected:
        raise TruncatedFile(
            f"{path}: payload is {len(body)} bytes, header declares {expected}"
        )
    if len(body) > expected:
        raise InvalidMatrix(f"{path}: {len(body) - expected} trailing bytes after payload")
    if n_rows < 1 or dim < 1:
        raise InvalidMatrix(f"{path}: header declares {n_rows}x{dim}")
    values = np.frombuffer(body, dtype="<f4").reshape(n_rows, dim)
    return EmbeddingMatrix(values.copy())
