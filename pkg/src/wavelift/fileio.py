"""Binary PGM images and the subband container format."""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["PGMError", "SubbandFormatError", "read_pgm", "write_pgm", "SubbandFile", "read_subbands", "write_subbands"]

SUBBAND_MAGIC = "WAVELIFT-SUBBANDS 1"


class PGMError(ValueError):
    pass


class SubbandFormatError(ValueError):
    pass


def _pgm_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """First ``count`` header tokens (comments skipped) and the offset just past them."""
    tokens, pos, n = [], 0, len(data)
    while len(tokens) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise PGMError("truncated PGM header")
        tokens.append(data[start:pos])
    return tokens, pos


def read_pgm(path: str | Path) -> tuple[np.ndarray, int]:
    """Read a binary (P5) PGM; returns integer samples (row-major) and maxval."""
    data = Path(path).read_bytes()
    tokens, pos = _pgm_tokens(data, 4)
    if tokens[0] != b"P5":
        raise PGMError(f"not a binary PGM (magic {tokens[0][:8]!r})")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise PGMError("non-numeric PGM header field") from None
    if width <= 0 or height <= 0 or not 0 < maxval < 65536:
        raise PGMError(f"invalid PGM header: {width}x{height} maxval {maxval}")
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise PGMError("missing whitespace after PGM header")
    pos += 1
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    need = width * height * dtype.itemsize
    payload = data[pos : pos + need]
    if len(payload) != need:
        raise PGMError(f"PGM payload has {len(payload)} bytes, expected {need}")
    pixels = np.frombuffer(payload, dtype=dtype).reshape(height, width).astype(np.int64)
    if pixels.max(initial=0) > maxval:
        raise PGMError("PGM sample exceeds maxval")
    return pixels, maxval


def write_pgm(path: str | Path, pixels, maxval: int = 255) -> None:
    arr = np.asarray(pixels)
    if arr.ndim != 2:
        raise PGMError("PGM images are 2-D")
    if not 0 < maxval < 65536:
        raise PGMError(f"maxval must be in 1..65535, got {maxval}")
    if arr.min(initial=0) < 0 or arr.max(initial=0) > maxval:
        raise PGMError("samples out of range for maxval")
    dtype = ">u2" if maxval > 255 else "u1"
    h, w = arr.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n{maxval}\n".encode("ascii"))
        fh.write(arr.astype(dtype).tobytes())


@dataclass
class SubbandFile:
    """A pyramid plus everything needed to invert it.

    ``details[k]`` holds level ``k + 1`` (finest first) as ``(HL, LH, HH)``;
    ``approx`` is the coarsest LL. On disk each level is written as
    LL, HL, LH, HH with the LL slot present only at the coarsest level.
    """

    wavelet: str
    scheme: str
    levels: int
    boundary: str
    scaling: bool
    width: int
    height: int
    pad: tuple  # (right, bottom) samples added before transforming
    maxval: int
    details: list
    approx: np.ndarray

    def plane_shapes(self) -> list[tuple[int, int]]:
        return [d[0].shape for d in self.details]


def write_subbands(path: str | Path, sf: SubbandFile) -> None:
    if len(sf.details) != sf.levels:
        raise SubbandFormatError("levels does not match the number of detail levels")
    lines = [
        SUBBAND_MAGIC,
        f"wavelet {sf.wavelet}",
        f"scheme {sf.scheme}",
        f"levels {sf.levels}",
        f"boundary {sf.boundary}",
        f"scaling {int(bool(sf.scaling))}",
        f"size {sf.width} {sf.height}",
        f"pad {sf.pad[0]} {sf.pad[1]}",
        f"maxval {sf.maxval}",
    ]
    for k, (hl, _, _) in enumerate(sf.details, start=1):
        lines.append(f"plane {k} {hl.shape[1]} {hl.shape[0]}")
    lines.append("end")
    buf = io.BytesIO()
    buf.write(("\n".join(lines) + "\n").encode("ascii"))
    for k, (hl, lh, hh) in enumerate(sf.details, start=1):
        group = ([sf.approx] if k == sf.levels else []) + [hl, lh, hh]
        for p in group:
            buf.write(np.ascontiguousarray(p, dtype="<f8").tobytes())
    Path(path).write_bytes(buf.getvalue())


def read_subbands(path: str | Path) -> SubbandFile:
    data = Path(path).read_bytes()
    fields: dict[str, list[str]] = {}
    shapes: dict[int, tuple[int, int]] = {}
    pos = 0
    first = True
    while True:
        nl = data.find(b"\n", pos)
        if nl < 0:
            raise SubbandFormatError("header is not terminated by 'end'")
        try:
            line = data[pos:nl].decode("ascii").strip()
        except UnicodeDecodeError:
            raise SubbandFormatError("non-ASCII header") from None
        pos = nl + 1
        if first:
            if line != SUBBAND_MAGIC:
                raise SubbandFormatError(f"bad magic {line[:40]!r}")
            first = False
            continue
        if line == "end":
            break
        key, *vals = line.split() or [""]
        if key == "plane":
            try:
                k, w, h = map(int, vals)
            except ValueError:
                raise SubbandFormatError(f"malformed plane line {line!r}") from None
            shapes[k] = (h, w)
        else:
            fields[key] = vals
    try:
        levels = int(fields["levels"][0])
        width, height = map(int, fields["size"])
        pad = tuple(map(int, fields["pad"]))
        sf_meta = dict(
            wavelet=fields["wavelet"][0],
            scheme=fields["scheme"][0],
            boundary=fields["boundary"][0],
            scaling=bool(int(fields["scaling"][0])),
            maxval=int(fields["maxval"][0]),
        )
    except (KeyError, IndexError, ValueError) as exc:
        raise SubbandFormatError(f"missing or malformed header field: {exc}") from None
    if sorted(shapes) != list(range(1, levels + 1)):
        raise SubbandFormatError("plane dimensions missing for some level")

    def take(shape):
        nonlocal pos
        n = shape[0] * shape[1] * 8
        chunk = data[pos : pos + n]
        if len(chunk) != n:
            raise SubbandFormatError("payload is truncated")
        pos += n
        return np.frombuffer(chunk, dtype="<f8").reshape(shape).astype(np.float64)

    details, approx = [], None
    for k in range(1, levels + 1):
        if k == levels:
            approx = take(shapes[k])
        details.append(tuple(take(shapes[k]) for _ in range(3)))
    if pos != len(data):
        raise SubbandFormatError(f"{len(data) - pos} trailing bytes after payload")
    return SubbandFile(levels=levels, width=width, height=height, pad=pad, details=details, approx=approx, **sf_meta)
