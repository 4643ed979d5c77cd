"""Binary container for MPS and MPO.

Layout (little endian)::

    magic    b"TTLAB1\\0"
    u32      version (1)
    u32      tensor count
    per tensor:
        u8       rank (3 or 4)
        u64[r]   dims
        c128[*]  row-major payload
    f64      error (MPS files only)
"""

from __future__ import annotations

import io as _io
import struct
from pathlib import Path

import numpy as np

from .core import MPO, MPS

MAGIC = b"TTLAB1\0"
VERSION = 1


class FormatError(ValueError):
    """Malformed or unsupported container."""


def _write(stream, tensors, error: float | None) -> None:
    stream.write(MAGIC)
    stream.write(struct.pack("<II", VERSION, len(tensors)))
    for t in tensors:
        t = np.ascontiguousarray(t, dtype="<c16")
        stream.write(struct.pack("<B", t.ndim))
        stream.write(struct.pack(f"<{t.ndim}Q", *t.shape))
        stream.write(t.tobytes(order="C"))
    if error is not None:
        stream.write(struct.pack("<d", error))


def dumps(obj: MPS | MPO) -> bytes:
    buf = _io.BytesIO()
    if isinstance(obj, MPS):
        _write(buf, obj.tensors, obj.error)
    elif isinstance(obj, MPO):
        _write(buf, obj.tensors, None)
    else:
        raise TypeError("only MPS and MPO can be serialized")
    return buf.getvalue()


def _read_exact(stream, n: int) -> bytes:
    data = stream.read(n)
    if len(data) != n:
        raise FormatError("truncated container")
    return data


def loads(data: bytes) -> MPS | MPO:
    stream = _io.BytesIO(data)
    if _read_exact(stream, len(MAGIC)) != MAGIC:
        raise FormatError("bad magic")
    version, count = struct.unpack("<II", _read_exact(stream, 8))
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    tensors = []
    ranks = set()
    for _ in range(count):
        (rank,) = struct.unpack("<B", _read_exact(stream, 1))
        if rank not in (3, 4):
            raise FormatError(f"invalid tensor rank {rank}")
        ranks.add(rank)
        dims = struct.unpack(f"<{rank}Q", _read_exact(stream, 8 * rank))
        size = int(np.prod(dims))
        payload = _read_exact(stream, 16 * size)
        tensors.append(np.frombuffer(payload, dtype="<c16").reshape(dims).astype(np.complex128))
    if len(ranks) > 1:
        raise FormatError("mixed tensor ranks")
    if ranks == {4}:
        if stream.read(1):
            raise FormatError("trailing bytes after MPO")
        return MPO(tensors)
    (error,) = struct.unpack("<d", _read_exact(stream, 8))
    if stream.read(1):
        raise FormatError("trailing bytes after MPS")
    return MPS(tensors, error)


def save(path, obj: MPS | MPO) -> None:
    Path(path).write_bytes(dumps(obj))


def load(path) -> MPS | MPO:
    return loads(Path(path).read_bytes())


__all__ = ["dumps", "loads", "save", "load", "FormatError"]
