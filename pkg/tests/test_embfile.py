"""Embedding sidecar file format: layout, round-trips, validation."""

import struct

import numpy as np
import pytest

from capsum.embfile import EmbeddingMatrix, read_embeddings, write_embeddings
from capsum.errors import BadMagic, InvalidMatrix, TruncatedFile, ZeroNormRow


def test_minimal_file_layout(tmp_path):
    """A 1x1 matrix writes exactly 16 bytes: magic, dims, one float."""
    path = tmp_path / "one.emb"
    write_embeddings(EmbeddingMatrix(np.array([[2.0]])), path)
    raw = path.read_bytes()
    assert len(raw) == 16
    assert raw[:4] == b"EMB1"
    n_rows, dim = struct.unpack_from("<II", raw, 4)
    assert (n_rows, dim) == (1, 1)
    assert struct.unpack_from("<f", raw, 12)[0] == 2.0


def test_write_rejects_nan():
    with pytest.raises(InvalidMatrix):
        EmbeddingMatrix(np.array([[1.0, np.nan]]))


def test_write_rejects_zero_norm_row():
    with pytest.raises(ZeroNormRow):
        EmbeddingMatrix(np.array([[1.0, 1.0], [0.0, 0.0]]))


def test_rejects_non_2d():
    with pytest.raises(InvalidMatrix):
        EmbeddingMatrix(np.array([1.0, 2.0]))


def test_read_write_round_trip_values(tmp_path):
    """read(write(m)) reproduces the float32 values exactly."""
    rng = np.random.default_rng(5)
    matrix = rng.standard_normal((5, 8)).astype(np.float32)
    path = tmp_path / "m.emb"
    write_embeddings(EmbeddingMatrix(matrix), path)
    back = read_embeddings(path)
    assert back.n_rows == 5 and back.dim == 8
    assert np.array_equal(back.values, matrix)


def test_write_read_round_trip_bytes(tmp_path):
    """write(read(f)) reproduces the byte stream exactly."""
    rng = np.random.default_rng(9)
    first = tmp_path / "a.emb"
    second = tmp_path / "b.emb"
    write_embeddings(EmbeddingMatrix(rng.standard_normal((7, 3))), first)
    write_embeddings(read_embeddings(first), second)
    assert first.read_bytes() == second.read_bytes()


def test_round_trip_many_shapes(tmp_path):
    rng = np.random.default_rng(11)
    for trial in range(20):
        n = int(rng.integers(1, 12))
        d = int(rng.integers(1, 12))
        matrix = rng.standard_normal((n, d)) + 0.1
        path = tmp_path / f"t{trial}.emb"
        write_embeddings(EmbeddingMatrix(matrix), path)
        back = read_embeddings(path)
        assert np.array_equal(back.values, matrix.astype(np.float32))


def test_bad_magic(tmp_path):
    path = tmp_path / "bad.emb"
    path.write_bytes(b"NOPE" + b"\x00" * 12)
    with pytest.raises(BadMagic):
        read_embeddings(path)


def test_truncated_header(tmp_path):
    path = tmp_path / "short.emb"
    path.write_bytes(b"EMB1\x01\x00")
    with pytest.raises(TruncatedFile):
        read_embeddings(path)


def test_truncated_payload(tmp_path):
    path = tmp_path / "cut.emb"
    write_embeddings(EmbeddingMatrix(np.ones((2, 3))), path)
    raw = path.read_bytes()
    path.write_bytes(raw[:-4])
    with pytest.raises(TruncatedFile):
        read_embeddings(path)


def test_trailing_bytes_rejected(tmp_path):
    path = tmp_path / "long.emb"
    write_embeddings(EmbeddingMatrix(np.ones((2, 3))), path)
    path.write_bytes(path.read_bytes() + b"\x00\x00\x00\x00")
    with pytest.raises(InvalidMatrix):
        read_embeddings(path)


def test_read_zero_norm_row_rejected(tmp_path):
    """A file whose payload contains an all-zero row fails validation."""
    path = tmp_path / "zero.emb"
    header = b"EMB1" + struct.pack("<II", 2, 2)
    payload = struct.pack("<4f", 1.0, 2.0, 0.0, 0.0)
    path.write_bytes(header + payload)
    with pytest.raises(ZeroNormRow):
        read_embeddings(path)


def test_missing_file(tmp_path):
    with pytest.raises(InvalidMatrix):
        read_embeddings(tmp_path / "absent.emb")


def test_float64_input_is_stored_as_float32(tmp_path):
    value = np.array([[1.0 / 3.0]])
    path = tmp_path / "f32.emb"
    write_embeddings(EmbeddingMatrix(value), path)
    back = read_embeddings(path)
    assert back.values.dtype == np.float32
    assert back.values[0, 0] == np.float32(1.0 / 3.0)
