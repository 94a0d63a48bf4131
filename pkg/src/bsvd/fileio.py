"""Binary batch files.

Matrix container ("BSVD"): a 12-byte header (magic "BSVD", version byte
= 1, dtype byte, two reserved zero bytes, uint32-LE count) followed by
one record per matrix: uint32-LE m, uint32-LE n, then m*n elements
little-endian in column-major order, complex stored as adjacent
(re, im). dtype byte: 0 = float32, 1 = float64, 2 = complex64,
3 = complex128. Round-trips are bit-exact; any bytes after the last
record make the file invalid.

Result container ("BSVR", same header layout): per problem uint32-LE
m, n, r (= number of singular values; 0 for a failed slot) and a uint32
flag word (bit 0: V present, bit 1: converged, bit 2: failed), followed
for non-failed slots by U (m*r elements), sigma (r elements in the real
dtype), and V (n*r elements) when present.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .core import DomainError, check_dtype, real_dtype

__all__ = [
    "FormatError",
    "DTYPE_CODES",
    "write_matrices",
    "read_matrices",
    "ResultRecord",
    "write_results",
    "read_results",
]


class FormatError(ValueError):
    """The byte stream does not conform to the container layout."""


_MAGIC_MATRICES = b"BSVD"
_MAGIC_RESULTS = b"BSVR"
_VERSION = 1
_HEADER = struct.Struct("<4sBBBBI")
_SHAPE = struct.Struct("<II")
_RESULT_HEAD = struct.Struct("<IIII")

DTYPE_CODES = {
    np.dtype(np.float32): 0,
    np.dtype(np.float64): 1,
    np.dtype(np.complex64): 2,
    np.dtype(np.complex128): 3,
}
_CODE_TO_DTYPE = {v: k for k, v in DTYPE_CODES.items()}
_LE_OF = {
    np.dtype(np.float32): np.dtype("<f4"),
    np.dtype(np.float64): np.dtype("<f8"),
    np.dtype(np.complex64): np.dtype("<c8"),
    np.dtype(np.complex128): np.dtype("<c16"),
}

_FLAG_HAS_V = 1
_FLAG_CONVERGED = 2
_FLAG_FAILED = 4


def _pack_header(magic: bytes, dtype: np.dtype, count: int) -> bytes:
    return _HEADER.pack(magic, _VERSION, DTYPE_CODES[dtype], 0, 0, count)


def _parse_header(data: bytes, magic: bytes, what: str):
    if len(data) < _HEADER.size:
        raise FormatError(f"{what}: too short for a header")
    got_magic, version, code, r0, r1, count = _HEADER.unpack_from(data, 0)
    if got_magic != magic:
        raise FormatError(f"{what}: bad magic {got_magic!r}")
    if version != _VERSION:
        raise FormatError(f"{what}: unsupported version {version}")
    if code not in _CODE_TO_DTYPE:
        raise FormatError(f"{what}: unknown dtype code {code}")
    if r0 != 0 or r1 != 0:
        raise FormatError(f"{what}: reserved bytes must be zero")
    return _CODE_TO_DTYPE[code], count, _HEADER.size


def _elements_bytes(a: np.ndarray, dtype: np.dtype) -> bytes:
    return np.asfortranarray(a).astype(_LE_OF[dtype], copy=False).tobytes(order="F")


def _take(data: bytes, offset: int, nbytes: int, what: str) -> tuple[bytes, int]:
    end = offset + nbytes
    if end > len(data):
        raise FormatError(f"{what}: file ends mid-record")
    return data[offset:end], end


def _read_elements(data, offset, dtype, count, shape, what):
    le = _LE_OF[dtype]
    raw, offset = _take(data, offset, le.itemsize * count, what)
    arr = np.frombuffer(raw, dtype=le).astype(dtype)
    return arr.reshape(shape, order="F"), offset


def write_matrices(path, matrices) -> None:
    """Serialize a batch of same-dtype matrices."""
    matrices = list(matrices)
    if matrices:
        dtype = check_dtype(np.asarray(matrices[0]).dtype)
    else:
        dtype = np.dtype(np.float64)
    chunks = [_pack_header(_MAGIC_MATRICES, dtype, len(matrices))]
    for idx, mat in enumerate(matrices):
        a = np.asarray(mat)
        if a.ndim != 2:
            raise DomainError(f"matrix {idx} is not 2-d")
        if a.dtype != dtype:
            raise DomainError(
                f"matrix {idx} has dtype {a.dtype}, batch dtype is {dtype}"
            )
        chunks.append(_SHAPE.pack(a.shape[0], a.shape[1]))
        chunks.append(_elements_bytes(a, dtype))
    with open(path, "wb") as fh:
        fh.write(b"".join(chunks))


def read_matrices(path) -> list[np.ndarray]:
    """Parse a matrix container; inverse of write_matrices, bit-exactly."""
    with open(path, "rb") as fh:
        data = fh.read()
    dtype, count, offset = _parse_header(data, _MAGIC_MATRICES, "matrix file")
    out = []
    for idx in range(count):
        raw, offset = _take(data, offset, _SHAPE.size, f"matrix {idx}")
        m, n = _SHAPE.unpack(raw)
        a, offset = _read_elements(data, offset, dtype, m * n, (m, n), f"matrix {idx}")
        out.append(a)
    if offset != len(data):
        raise FormatError(f"trailing bytes after last matrix ({len(data) - offset})")
    return out


@dataclass(frozen=True)
class ResultRecord:
    m: int
    n: int
    converged: bool
    failed: bool
    u: np.ndarray | None
    sigma: np.ndarray | None
    v: np.ndarray | None


def write_results(path, matrices, results) -> None:
    """Serialize solver output aligned with its input batch.

    ``results`` entries may be None (failed problems); shapes then come
    from the corresponding input matrix.
    """
    matrices = list(matrices)
    results = list(results)
    if len(matrices) != len(results):
        raise DomainError(
            f"{len(results)} results for {len(matrices)} matrices"
        )
    if matrices:
        dtype = check_dtype(np.asarray(matrices[0]).dtype)
    else:
        dtype = np.dtype(np.float64)
    rdt = real_dtype(dtype)
    chunks = [_pack_header(_MAGIC_RESULTS, dtype, len(results))]
    for mat, res in zip(matrices, results):
        m, n = np.asarray(mat).shape
        if res is None:
            chunks.append(_RESULT_HEAD.pack(m, n, 0, _FLAG_FAILED))
            continue
        r = len(res.sigma)
        flags = 0
        if res.v is not None:
            flags |= _FLAG_HAS_V
        if res.info.converged:
            flags |= _FLAG_CONVERGED
        chunks.append(_RESULT_HEAD.pack(m, n, r, flags))
        chunks.append(_elements_bytes(res.u, dtype))
        chunks.append(
            np.ascontiguousarray(res.sigma).astype(_LE_OF[rdt]).tobytes()
        )
        if res.v is not None:
            chunks.append(_elements_bytes(res.v, dtype))
    with open(path, "wb") as fh:
        fh.write(b"".join(chunks))


def read_results(path) -> list[ResultRecord]:
    with open(path, "rb") as fh:
        data = fh.read()
    dtype, count, offset = _parse_header(data, _MAGIC_RESULTS, "result file")
    rdt = real_dtype(dtype)
    out = []
    for idx in range(count):
        raw, offset = _take(data, offset, _RESULT_HEAD.size, f"result {idx}")
        m, n, r, flags = _RESULT_HEAD.unpack(raw)
        if flags & _FLAG_FAILED:
            out.append(ResultRecord(m, n, False, True, None, None, None))
            continue
        u, offset = _read_elements(data, offset, dtype, m * r, (m, r), f"result {idx} U")
        sig, offset = _read_elements(data, offset, rdt, r, (r,), f"result {idx} sigma")
        v = None
        if flags & _FLAG_HAS_V:
            v, offset = _read_elements(data, offset, dtype, n * r, (n, r), f"result {idx} V")
        out.append(
            ResultRecord(
                m, n, bool(flags & _FLAG_CONVERGED), False, u, np.asarray(sig), v
            )
        )
    if offset != len(data):
        raise FormatError(f"trailing bytes after last result ({len(data) - offset})")
    return out
