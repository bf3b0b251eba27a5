"""Vehicle position from the lane pair, plus sliding-window smoothing.

The raw position is the mean of the two lanes' crossings of the ROI
ceiling row; it needs both lanes. The accumulating average keeps the last
n (default 8) raw positions and reports their mean, holding the old mean
on frames where no raw position exists.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import ParameterError
from .lanes import LanePair, lane_x_at

POSITION_MAX = 320.0
DEFAULT_SETPOINT_X = 160.0
DEFAULT_WINDOW = 8


@dataclass(frozen=True)
class Setpoint:
    x: float = DEFAULT_SETPOINT_X
    y: int = 120  # ROI ceiling row for 240-row frames


@dataclass(frozen=True)
class PositionEstimate:
    raw: float | None
    smoothed: float
    method: str  # "paa" or "kalman"
    lanes_detected: int


def lane_midpoint(pair: LanePair, ceiling_y: float) -> float | None:
    """Mean of the two ceiling-row crossings, clamped to [0, 320].

    Absent unless both lanes are present; a single lane is not
    extrapolated (the lane trackers cover that gap).
    """
    if pair.left is None or pair.right is None:
        return None
    if pair.left.m == 0.0 or pair.right.m == 0.0:
        raise ParameterError("horizontal lane cannot cross the ceiling row uniquely")
    mid = (lane_x_at(pair.left, ceiling_y) + lane_x_at(pair.right, ceiling_y)) / 2.0
    return min(max(mid, 0.0), POSITION_MAX)


class PaaBuffer:
    """FIFO of the most recent raw positions, averaged on demand."""

    def __init__(self, capacity: int = DEFAULT_WINDOW):
        if capacity < 1:
            raise ParameterError(f"capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self.values: deque[float] = deque(maxlen=capacity)

    def update(self, raw: float) -> float:
        """Append a raw position (evicting the oldest) and return the mean."""
        if not (0.0 <= raw <= POSITION_MAX):
            raise ParameterError(f"position {raw} outside [0, {POSITION_MAX}]")
        self.values.append(float(raw))
        return sum(self.values) / len(self.values)

    def peek(self) -> float | None:
        """Mean of the stored values without mutating; None when empty."""
        if not self.values:
            return None
        return sum(self.values) / len(self.values)
