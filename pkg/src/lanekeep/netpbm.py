"""Binary PGM (P5) and PPM (P6) readers/writers, maxval 255.

Grayscale frames are uint8 arrays of shape (h, w), color frames uint8
(h, w, 3), edge maps boolean (h, w) stored as PGM with values {0, 255}.
"""

from __future__ import annotations

import numpy as np

from .errors import FrameFormatError


def _read_header_token(data: bytes, pos: int) -> tuple[bytes, int]:
    # skip whitespace and '#' comments, then collect one token
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c == b"#":
            while pos < n and data[pos : pos + 1] != b"\n":
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos : pos + 1].isspace():
        pos += 1
    if start == pos:
        raise FrameFormatError("truncated header")
    return data[start:pos], pos


def _parse(data: bytes, magic: bytes, channels: int) -> np.ndarray:
    tok, pos = _read_header_token(data, 0)
    if tok != magic:
        raise FrameFormatError(f"expected magic {magic.decode()}, got {tok!r}")
    fields = []
    for _ in range(3):
        tok, pos = _read_header_token(data, pos)
        try:
            fields.append(int(tok))
        except ValueError:
            raise FrameFormatError(f"bad header field {tok!r}") from None
    width, height, maxval = fields
    if width <= 0 or height <= 0:
        raise FrameFormatError(f"bad dimensions {width}x{height}")
    if maxval != 255:
        raise FrameFormatError(f"unsupported maxval {maxval}")
    pos += 1  # single whitespace byte separates header from raster
    count = width * height * channels
    raster = data[pos : pos + count]
    if len(raster) < count:
        raise FrameFormatError(f"raster truncated: {len(raster)} of {count} bytes")
    arr = np.frombuffer(raster, dtype=np.uint8, count=count)
    if channels == 1:
        return arr.reshape(height, width).copy()
    return arr.reshape(height, width, channels).copy()


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as f:
        return _parse(f.read(), b"P5", 1)


def read_ppm(path) -> np.ndarray:
    with open(path, "rb") as f:
        return _parse(f.read(), b"P6", 3)


def read_frame(path) -> np.ndarray:
    """Read a PGM or PPM by magic number (gray (h,w) or color (h,w,3))."""
    with open(path, "rb") as f:
        data = f.read()
    if data[:2] == b"P5":
        return _parse(data, b"P5", 1)
    if data[:2] == b"P6":
        return _parse(data, b"P6", 3)
    raise FrameFormatError(f"not a binary PGM/PPM: magic {data[:2]!r}")


def write_pgm(path, gray: np.ndarray) -> None:
    gray = np.ascontiguousarray(gray, dtype=np.uint8)
    if gray.ndim != 2:
        raise FrameFormatError("PGM needs a 2-d array")
    h, w = gray.shape
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (w, h))
        f.write(gray.tobytes())


def write_ppm(path, rgb: np.ndarray) -> None:
    rgb = np.ascontiguousarray(rgb, dtype=np.uint8)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise FrameFormatError("PPM needs an (h, w, 3) array")
    h, w, _ = rgb.shape
    with open(path, "wb") as f:
        f.write(b"P6\n%d %d\n255\n" % (w, h))
        f.write(rgb.tobytes())


def write_edge_pgm(path, edges: np.ndarray) -> None:
    write_pgm(path, np.where(np.asarray(edges, dtype=bool), 255, 0).astype(np.uint8))


def read_edge_pgm(path) -> np.ndarray:
    return read_pgm(path) != 0
