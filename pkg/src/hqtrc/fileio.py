"""Binary tensor files (.trt) and binary NetPBM images (P5/P6).

.trt layout: b"TRT1", uint8 order N, N little-endian uint64 dims, then
prod(dims) little-endian float64 values with the first index fastest.
"""

from __future__ import annotations

import os
import struct

import numpy as np

MAGIC = b"TRT1"
_MAX_ENTRIES = 1 << 40


class FormatError(ValueError):
    def __init__(self, msg: str, offset: int | None = None):
        if offset is not None:
            msg = f"{msg} (byte offset {offset})"
        super().__init__(msg)
        self.offset = offset


def encode_trt(x) -> bytes:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim < 1 or x.ndim > 255:
        raise ValueError("tensor order must lie in 1..255")
    header = MAGIC + struct.pack("<B", x.ndim) + struct.pack(f"<{x.ndim}Q", *x.shape)
    return header + x.astype("<f8").tobytes(order="F")


def decode_trt(buf: bytes) -> np.ndarray:
    if len(buf) < 5:
        raise FormatError(f"truncated header: need 5 bytes, missing {5 - len(buf)}", len(buf))
    if buf[:4] != MAGIC:
        raise FormatError(f"bad magic {buf[:4]!r}", 0)
    n = buf[4]
    if n == 0:
        raise FormatError("tensor order 0", 4)
    end = 5 + 8 * n
    if len(buf) < end:
        raise FormatError(f"truncated dims: missing {end - len(buf)} bytes", len(buf))
    dims = struct.unpack(f"<{n}Q", buf[5:end])
    total = 1
    for k, dim in enumerate(dims):
        if dim == 0:
            raise FormatError(f"dimension {k + 1} is zero", 5 + 8 * k)
        total *= dim
        if total > _MAX_ENTRIES:
            raise FormatError("dimension product overflows", 5 + 8 * k)
    need = end + 8 * total
    if len(buf) < need:
        raise FormatError(f"truncated values: missing {need - len(buf)} bytes", len(buf))
    if len(buf) > need:
        raise FormatError(f"{len(buf) - need} trailing bytes", need)
    vals = np.frombuffer(buf, dtype="<f8", count=total, offset=end)
    return vals.astype(np.float64).reshape(dims, order="F")


def write_trt(path: str | os.PathLike, x) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_trt(x))


def read_trt(path: str | os.PathLike) -> np.ndarray:
    with open(path, "rb") as fh:
        return decode_trt(fh.read())


def _header_tokens(buf: bytes, count: int) -> tuple[list[bytes], int]:
    tokens, pos = [], 0
    while len(tokens) < count:
        while pos < len(buf) and buf[pos:pos + 1].isspace():
            pos += 1
        if pos < len(buf) and buf[pos:pos + 1] == b"#":
            while pos < len(buf) and buf[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(buf) and not buf[pos:pos + 1].isspace() and buf[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise FormatError("malformed NetPBM header", pos)
        tokens.append(buf[start:pos])
    # exactly one whitespace byte separates maxval from the raster
    if pos >= len(buf) or not buf[pos:pos + 1].isspace():
        raise FormatError("malformed NetPBM header", pos)
    return tokens, pos + 1


def decode_netpbm(buf: bytes) -> np.ndarray:
    """Returns an I1 x I2 x n tensor in [0, 1] (n = 1 for P5, 3 for P6)."""
    tokens, pos = _header_tokens(buf, 4)
    magic = tokens[0]
    if magic not in (b"P5", b"P6"):
        raise FormatError(f"unsupported NetPBM type {magic!r}", 0)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise FormatError("non-numeric NetPBM header field", 0) from None
    if width < 1 or height < 1:
        raise FormatError("empty image", 0)
    if not 1 <= maxval <= 255:
        raise FormatError(f"unsupported maxval {maxval}", 0)
    channels = 1 if magic == b"P5" else 3
    need = width * height * channels
    raster = buf[pos:pos + need]
    if len(raster) < need:
        raise FormatError(f"truncated raster: missing {need - len(raster)} bytes", len(buf))
    img = np.frombuffer(raster, dtype=np.uint8).reshape(height, width, channels)
    return img.astype(np.float64) / maxval


def to_bytes255(x) -> np.ndarray:
    """Clamp to [0, 1] and round half up onto 0..255."""
    x = np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)
    return np.floor(x * 255 + 0.5).astype(np.uint8)


def encode_netpbm(x) -> bytes:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 2:
        x = x[..., None]
    if x.ndim != 3 or x.shape[2] not in (1, 3):
        raise ValueError(f"expected I1 x I2 x 1 or I1 x I2 x 3, got {x.shape}")
    magic = b"P5" if x.shape[2] == 1 else b"P6"
    header = magic + f"\n{x.shape[1]} {x.shape[0]}\n255\n".encode("ascii")
    return header + to_bytes255(x).tobytes(order="C")


def read_netpbm(path: str | os.PathLike) -> np.ndarray:
    with open(path, "rb") as fh:
        return decode_netpbm(fh.read())


def write_netpbm(path: str | os.PathLike, x) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_netpbm(x))
