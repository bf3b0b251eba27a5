"""Two-byte serial position protocol.

Pixel positions 0..320 map onto 1..99 so a frame fits in at most two
ASCII digit bytes plus a newline terminator. A value is put on the wire
only when it differs from the last transmitted one. The receiver
accumulates digits by decimal shifting until the terminator arrives; any
other byte resets the accumulator so the stream resynchronizes on the
next frame boundary.
"""

from __future__ import annotations

import numpy as np

from .errors import FramingError, ParameterError

TERMINATOR = 0x0A  # newline: any non-digit ASCII works, this one reads well in dumps
VALUE_MIN, VALUE_MAX = 1, 99
PIXEL_MAX = 320


def map_position(x) -> int:
    """Compress pixel 0..320 to wire value 1..99 (affine, endpoints exact)."""
    if not (0 <= x <= PIXEL_MAX):
        raise ParameterError(f"pixel {x} outside [0, {PIXEL_MAX}]")
    return 1 + int(98.0 * x / PIXEL_MAX + 0.5)


def unmap_position(v) -> int:
    """Controller-side inverse; round trip is within 2 px of the original."""
    if not (VALUE_MIN <= v <= VALUE_MAX):
        raise ParameterError(f"wire value {v} outside [{VALUE_MIN}, {VALUE_MAX}]")
    return int((v - 1) * 320.0 / 98.0 + 0.5)


class PositionEncoder:
    """Send-on-change framing: digits of the value, then the terminator."""

    def __init__(self):
        self.last_sent: int | None = None

    def encode(self, v: int) -> bytes:
        if not (VALUE_MIN <= v <= VALUE_MAX):
            raise ParameterError(f"wire value {v} outside [{VALUE_MIN}, {VALUE_MAX}]")
        if v == self.last_sent:
            return b""
        self.last_sent = v
        return b"%d" % v + bytes([TERMINATOR])


class FrameDecoder:
    """Digit accumulator; emits one value per terminated frame."""

    def __init__(self):
        self.accumulator = 0
        self.in_progress = False
        self.last_value: int | None = None

    def push(self, byte: int) -> int | None:
        """Feed one byte; returns a completed value or None.

        Raises FramingError (after resetting) when a terminator completes
        a value outside 1..99.
        """
        if 0x30 <= byte <= 0x39:
            self.accumulator = self.accumulator * 10 + (byte - 0x30)
            self.in_progress = True
            return None
        value, self.accumulator, self.in_progress = self.accumulator, 0, False
        if byte != TERMINATOR:
            return None  # garbage: resynchronize at the next terminator
        if not (VALUE_MIN <= value <= VALUE_MAX):
            raise FramingError(f"frame value {value} outside [{VALUE_MIN}, {VALUE_MAX}]")
        self.last_value = value
        return value

    def feed(self, data: bytes) -> list[int]:
        """Push a byte string; returns every completed value in order."""
        out = []
        for b in data:
            v = self.push(b)
            if v is not None:
                out.append(v)
        return out


class ByteChannel:
    """In-memory byte link with optional independent per-byte loss."""

    def __init__(self, loss: float = 0.0, seed: int = 0):
        if not (0.0 <= loss < 1.0):
            raise ParameterError(f"loss probability {loss} outside [0, 1)")
        self.loss = loss
        self._rng = np.random.default_rng(seed)

    def send(self, data: bytes) -> bytes:
        if self.loss == 0.0 or not data:
            return data
        keep = self._rng.random(len(data)) >= self.loss
        return bytes(b for b, k in zip(data, keep) if k)
