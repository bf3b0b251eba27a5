"""Road geometry: a centerline of straight/arc segments plus lane width.

Track files are plain text: a `lane_width <meters>` header line, then one
`<length> <curvature>` pair per line (meters, 1/meters; positive curvature
bends left). `#` starts a comment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import TrackFormatError


@dataclass(frozen=True)
class Segment:
    length: float
    curvature: float


@dataclass(frozen=True)
class TrackSpec:
    segments: tuple[Segment, ...]
    lane_width: float

    def __post_init__(self):
        if self.lane_width <= 0:
            raise TrackFormatError(f"lane_width must be positive, got {self.lane_width}")
        if not self.segments:
            raise TrackFormatError("track needs at least one segment")
        for seg in self.segments:
            if seg.length <= 0:
                raise TrackFormatError(f"segment length must be positive, got {seg.length}")
            if abs(seg.curvature) * self.lane_width >= 1.0:
                raise TrackFormatError(
                    f"curvature {seg.curvature} too tight for lane width {self.lane_width}"
                )

    @property
    def total_length(self) -> float:
        return sum(seg.length for seg in self.segments)


def parse_track(text: str) -> TrackSpec:
    lane_width = None
    segments = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "lane_width":
            if len(parts) != 2:
                raise TrackFormatError("lane_width needs exactly one value", line_no)
            try:
                lane_width = float(parts[1])
            except ValueError:
                raise TrackFormatError(f"bad lane_width {parts[1]!r}", line_no) from None
            continue
        if len(parts) != 2:
            raise TrackFormatError(f"expected 'length curvature', got {line!r}", line_no)
        try:
            segments.append(Segment(length=float(parts[0]), curvature=float(parts[1])))
        except ValueError:
            raise TrackFormatError(f"bad segment numbers {line!r}", line_no) from None
    if lane_width is None:
        raise TrackFormatError("missing 'lane_width <w>' header line")
    return TrackSpec(segments=tuple(segments), lane_width=lane_width)


def load_track(path) -> TrackSpec:
    with open(path, "r", encoding="utf-8") as f:
        return parse_track(f.read())


def wrap_angle(a: float) -> float:
    """Normalize to (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a > math.pi:
        a -= 2.0 * math.pi
    elif a <= -math.pi:
        a += 2.0 * math.pi
    return a


class Centerline:
    """Arclength-parameterized centerline with projection support."""

    def __init__(self, track: TrackSpec):
        self.track = track
        self.total_length = track.total_length
        # pose at the start of each segment
        self._starts = []
        x = y = heading = 0.0
        s0 = 0.0
        for seg in track.segments:
            self._starts.append((s0, x, y, heading))
            if seg.curvature == 0.0:
                x += seg.length * math.cos(heading)
                y += seg.length * math.sin(heading)
            else:
                h2 = heading + seg.curvature * seg.length
                x += (math.sin(h2) - math.sin(heading)) / seg.curvature
                y -= (math.cos(h2) - math.cos(heading)) / seg.curvature
                heading = h2
            s0 += seg.length

    def pose_at(self, s: float) -> tuple[float, float, float]:
        """(x, y, tangent heading) at arclength s; extrapolates straight
        past either end so rendering near the boundaries stays defined."""
        if s <= 0.0:
            _, x, y, heading = self._starts[0]
            return x + s * math.cos(heading), y + s * math.sin(heading), heading
        if s >= self.total_length:
            seg = self.track.segments[-1]
            s0, x, y, heading = self._starts[-1]
            x, y, heading = self._advance(seg, x, y, heading, seg.length)
            extra = s - self.total_length
            return x + extra * math.cos(heading), y + extra * math.sin(heading), heading
        for (s0, x, y, heading), seg in zip(reversed(self._starts),
                                            reversed(self.track.segments)):
            if s >= s0:
                return self._advance(seg, x, y, heading, s - s0)
        raise AssertionError("unreachable")

    @staticmethod
    def _advance(seg, x, y, heading, ds):
        if seg.curvature == 0.0:
            return x + ds * math.cos(heading), y + ds * math.sin(heading), heading
        h2 = heading + seg.curvature * ds
        return (
            x + (math.sin(h2) - math.sin(heading)) / seg.curvature,
            y - (math.cos(h2) - math.cos(heading)) / seg.curvature,
            h2,
        )

    def boundary_point(self, s: float, side: float) -> tuple[float, float]:
        """Lane boundary at arclength s; side +1 is left of travel."""
        x, y, heading = self.pose_at(s)
        half = 0.5 * self.track.lane_width * side
        return x - half * math.sin(heading), y + half * math.cos(heading)

    def project(self, px: float, py: float, s_hint: float,
                back: float = 0.5, forward: float = 1.0) -> tuple[float, float, float]:
        """Nearest centerline point near s_hint.

        Returns (s, lateral, tangent heading); lateral is positive when the
        query point lies left of the travel direction.
        """

        def dist2(s):
            x, y, _ = self.pose_at(s)
            return (px - x) ** 2 + (py - y) ** 2

        lo = max(0.0, s_hint - back)
        hi = min(self.total_length, s_hint + forward)
        if hi <= lo:
            hi = lo + 1e-9
        n = 256
        step = (hi - lo) / n
        best_s, best_d = lo, dist2(lo)
        for i in range(1, n + 1):
            s = lo + i * step
            d = dist2(s)
            if d < best_d:
                best_s, best_d = s, d
        a, b = max(0.0, best_s - step), min(self.total_length, best_s + step)
        for _ in range(60):  # ternary refinement
            m1 = a + (b - a) / 3.0
            m2 = b - (b - a) / 3.0
            if dist2(m1) <= dist2(m2):
                b = m2
            else:
                a = m1
        s = 0.5 * (a + b)
        x, y, heading = self.pose_at(s)
        lateral = -(px - x) * math.sin(heading) + (py - y) * math.cos(heading)
        return s, lateral, heading
