"""Binary tensor files for likelihood batches and alignments.

Layout (little-endian, version 1)::

    magic            8 bytes   b"MASTENS\\0"
    version          u32       1
    dtype            u8        0 = float32, 1 = uint8
    ndims            u8        3
    dims             3 x u64   B, T, S
    lengths_present  u8        0 or 1
    payload          B*T*S elements, row-major
    lengths          B x (u32 t_b, u32 s_b), only if lengths_present == 1

float32 files load as LikelihoodBatch, uint8 files as AlignmentMatrix.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .core import AlignmentMatrix, LikelihoodBatch, MasError

MAGIC = b"MASTENS\0"
VERSION = 1
HEADER = struct.Struct("<8sIBB3QB")
DTYPES = {0: np.dtype("<f4"), 1: np.dtype("u1")}
DEFAULT_BYTE_BUDGET = 1 << 32


class IoFailure(MasError):
    pass


class BadMagic(IoFailure):
    pass


class UnsupportedVersion(IoFailure):
    pass


class TruncatedFile(IoFailure):
    pass


class DimensionOverflow(IoFailure):
    pass


def encode_tensor(tensor: LikelihoodBatch | AlignmentMatrix) -> bytes:
    if isinstance(tensor, LikelihoodBatch):
        code = 0
    elif isinstance(tensor, AlignmentMatrix):
        code = 1
    else:
        raise TypeError(f"cannot serialize {type(tensor).__name__}")
    b, t, s = tensor.shape
    header = HEADER.pack(MAGIC, VERSION, code, 3, b, t, s, 1)
    payload = np.ascontiguousarray(tensor.values, dtype=DTYPES[code]).tobytes()
    lengths = np.ascontiguousarray(tensor.valid_lengths, dtype="<u4").tobytes()
    return header + payload + lengths


def decode_header(head: bytes, byte_budget: int = DEFAULT_BYTE_BUDGET) -> tuple[int, tuple[int, int, int], bool]:
    """Validate a header and return ``(dtype_code, (B, T, S), lengths_present)``."""
    if len(head) < HEADER.size:
        n = min(len(head), len(MAGIC))
        if head[:n] != MAGIC[:n]:
            raise BadMagic("not a MASTENS file")
        raise TruncatedFile(f"header needs {HEADER.size} bytes, got {len(head)}")
    magic, version, code, ndims, b, t, s, has_lengths = HEADER.unpack_from(head)
    if magic != MAGIC:
        raise BadMagic(f"bad magic {magic!r}")
    if version != VERSION:
        raise UnsupportedVersion(f"version {version} not supported (expected {VERSION})")
    if code not in DTYPES or ndims != 3 or has_lengths not in (0, 1):
        raise IoFailure(f"malformed header: dtype={code}, ndims={ndims}, lengths_present={has_lengths}")
    if b * t * s * DTYPES[code].itemsize > byte_budget:
        raise DimensionOverflow(f"dims ({b}, {t}, {s}) exceed byte budget {byte_budget}")
    return code, (b, t, s), bool(has_lengths)


def decode_tensor(data: bytes, byte_budget: int = DEFAULT_BYTE_BUDGET) -> LikelihoodBatch | AlignmentMatrix:
    code, (b, t, s), has_lengths = decode_header(data, byte_budget)
    dtype = DTYPES[code]
    n = b * t * s
    payload_bytes = n * dtype.itemsize
    expected = HEADER.size + payload_bytes + (8 * b if has_lengths else 0)
    if len(data) < expected:
        raise TruncatedFile(f"expected {expected} bytes, file has {len(data)}")
    if len(data) > expected:
        raise IoFailure(f"{len(data) - expected} trailing bytes after tensor")
    values = np.frombuffer(data, dtype=dtype, count=n, offset=HEADER.size).reshape(b, t, s)
    lengths = None
    if has_lengths:
        lengths = np.frombuffer(data, dtype="<u4", count=2 * b, offset=HEADER.size + payload_bytes)
        lengths = lengths.reshape(b, 2).astype(np.int64)
    cls = LikelihoodBatch if code == 0 else AlignmentMatrix
    return cls(values, lengths)


def write_tensor(path, tensor: LikelihoodBatch | AlignmentMatrix) -> None:
    data = encode_tensor(tensor)
    try:
        Path(path).write_bytes(data)
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e


def read_tensor(path, byte_budget: int = DEFAULT_BYTE_BUDGET) -> LikelihoodBatch | AlignmentMatrix:
    path = Path(path)
    try:
        with path.open("rb") as f:
            head = f.read(HEADER.size)
            # dims are checked before the payload is pulled into memory
            decode_header(head, byte_budget)
            data = head + f.read()
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e
    return decode_tensor(data, byte_budget)
