"""Binary PGM images, raw coefficient dumps and benchmark CSV tables."""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from ggdshrink.image import ImageBuffer

RAW_MAGIC = b"GGDWAV1\x00"
_RAW_HEADER = struct.Struct("<8sII")


class PgmError(ValueError):
    """Base class for PGM parsing failures."""


class PgmUnsupportedError(PgmError):
    pass


class PgmHeaderError(PgmError):
    pass


class PgmTruncatedError(PgmError):
    pass


class PgmMaxvalError(PgmError):
    pass


def _header_tokens(data: bytes, count: int):
    """Read ``count`` whitespace-separated header tokens, skipping ``#`` comments.

    Returns the tokens and the offset of the single whitespace byte that
    terminates the last one.
    """
    tokens = []
    i, n = 0, len(data)
    while len(tokens) < count:
        while i < n and data[i:i + 1].isspace():
            i += 1
        if i >= n:
            raise PgmHeaderError("unexpected end of header")
        if data[i:i + 1] == b"#":
            while i < n and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        start = i
        while i < n and not data[i:i + 1].isspace() and data[i:i + 1] != b"#":
            i += 1
        tokens.append(data[start:i])
    if i >= n or not data[i:i + 1].isspace():
        raise PgmHeaderError("header must end with a single whitespace byte")
    return tokens, i + 1


def read_pgm(path) -> ImageBuffer:
    """Read a binary (P5) PGM with maxval 255 or 65535."""
    data = Path(path).read_bytes()
    magic = data[:2]
    if magic in (b"P1", b"P2", b"P3", b"P4", b"P6"):
        raise PgmUnsupportedError(f"unsupported PNM variant {magic.decode()}; only P5 is read")
    if magic != b"P5":
        raise PgmHeaderError(f"not a PGM file (magic {magic!r})")
    try:
        tokens, offset = _header_tokens(data[2:], 3)
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        if isinstance(exc, PgmError):
            raise
        raise PgmHeaderError(f"malformed header: {exc}") from None
    offset += 2
    if width < 1 or height < 1:
        raise PgmHeaderError(f"invalid dimensions {width}x{height}")
    if maxval == 255:
        dtype, depth = np.dtype("u1"), 8
    elif maxval == 65535:
        dtype, depth = np.dtype(">u2"), 16
    else:
        raise PgmMaxvalError(f"maxval {maxval} not supported (expected 255 or 65535)")
    need = width * height * dtype.itemsize
    payload = data[offset:offset + need]
    if len(payload) < need:
        raise PgmTruncatedError(f"payload has {len(payload)} bytes, expected {need}")
    pixels = np.frombuffer(payload, dtype=dtype).reshape(height, width).astype(float)
    return ImageBuffer(pixels, depth)


def round_half_away(x):
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def write_pgm(image: ImageBuffer, path) -> None:
    """Write ``image`` as binary PGM, rounding half away from zero.

    Pixels must already lie within ``[0, 2**B - 1]`` after rounding.
    """
    px = round_half_away(image.pixels)
    if px.min() < 0 or px.max() > image.peak:
        raise ValueError(
            f"pixel values outside [0, {image.peak}] after rounding; clamp before writing"
        )
    dtype = np.dtype("u1") if image.bit_depth == 8 else np.dtype(">u2")
    header = f"P5\n{image.cols} {image.rows}\n{image.peak}\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(px.astype(dtype).tobytes())


def write_raw_coeffs(array, path) -> None:
    """Dump a 2-D float array: 16-byte header then little-endian float64 data."""
    arr = np.asarray(array, dtype="<f8")
    if arr.ndim != 2:
        raise ValueError("raw dump expects a 2-D array")
    with open(path, "wb") as fh:
        fh.write(_RAW_HEADER.pack(RAW_MAGIC, arr.shape[0], arr.shape[1]))
        fh.write(np.ascontiguousarray(arr).tobytes())


def read_raw_coeffs(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < _RAW_HEADER.size:
        raise ValueError("raw dump shorter than its header")
    magic, rows, cols = _RAW_HEADER.unpack_from(data)
    if magic != RAW_MAGIC:
        raise ValueError(f"bad raw dump magic {magic!r}")
    body = data[_RAW_HEADER.size:]
    if len(body) != rows * cols * 8:
        raise ValueError(f"raw dump payload is {len(body)} bytes, expected {rows * cols * 8}")
    return np.frombuffer(body, dtype="<f8").reshape(rows, cols).astype(float)


CSV_COLUMNS = ("beta", "snr_db", "rule", "psnr_db", "psnr_std", "ssim", "runs")


def _fmt(x):
    return "" if x is None else f"{x:.4f}"


def emit_csv(rows, path) -> None:
    """Write benchmark rows; absent ``beta``/``ssim`` become empty fields."""
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to write")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow([_fmt(r.beta), _fmt(r.snr_db), r.rule, _fmt(r.psnr_db),
                        _fmt(r.psnr_std), _fmt(r.ssim), str(r.runs)])
