"""Hough line extraction and left/right lane classification.

Angle convention: a line's `theta` is its signed angle from the vertical
image axis in degrees, in [-90, 90). Lines leaning like the left lane
marker of a centered road ("/" on screen, negative image slope) get
negative theta; right markers ("\\") get positive theta. `rho` is the
perpendicular distance from the image origin in pixels and satisfies
x*cos(tn) + y*sin(tn) = rho_n for the underlying normal angle tn.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ParameterError

# classification windows in degrees, inclusive on both ends
LEFT_WINDOW = (-50.0, -25.0)
RIGHT_WINDOW = (25.0, 55.0)


@dataclass(frozen=True)
class PolarLine:
    rho: float
    theta: float  # degrees from the vertical axis, [-90, 90)
    votes: int = 0


@dataclass(frozen=True)
class Lane:
    m: float  # slope, image coordinates (y grows downward)
    b: float  # y-intercept in pixels


@dataclass(frozen=True)
class LanePair:
    left: Lane | None = None
    right: Lane | None = None

    @property
    def count(self) -> int:
        return (self.left is not None) + (self.right is not None)


@dataclass(frozen=True)
class HoughParams:
    rho_res: float = 1.0  # pixels per accumulator row
    theta_res: float = 1.0  # degrees per accumulator column
    vote_threshold: int = 30

    def __post_init__(self):
        if self.rho_res <= 0 or self.theta_res <= 0 or self.vote_threshold <= 0:
            raise ParameterError("Hough resolutions and threshold must be positive")


def find_accumulator_peaks(acc: np.ndarray, threshold: int) -> list[tuple[int, int, int]]:
    """Local maxima (votes, rho_bin, theta_bin) with votes >= threshold.

    A cell beats each 8-neighbor strictly, except that equal-vote ties go
    to the smaller (rho_bin, theta_bin) index. Sorted by votes descending,
    then ascending bin index.
    """
    n_rho, n_theta = acc.shape
    padded = np.full((n_rho + 2, n_theta + 2), -1, dtype=acc.dtype)
    padded[1:-1, 1:-1] = acc
    ok = acc >= threshold
    for dr in (-1, 0, 1):
        for dt in (-1, 0, 1):
            if dr == 0 and dt == 0:
                continue
            neigh = padded[1 + dr : n_rho + 1 + dr, 1 + dt : n_theta + 1 + dt]
            if (dr, dt) > (0, 0):  # neighbor has larger lex index: cell wins ties
                ok &= acc >= neigh
            else:
                ok &= acc > neigh
    rb, tb = np.nonzero(ok)
    peaks = [(int(acc[r, t]), int(r), int(t)) for r, t in zip(rb, tb)]
    peaks.sort(key=lambda p: (-p[0], p[1], p[2]))
    return peaks


def _to_vertical_angle(rho_n: float, theta_n_deg: float) -> tuple[float, float]:
    # normal angle in [0, 180) -> signed angle from the vertical axis
    if theta_n_deg <= 90.0:
        return rho_n, -theta_n_deg + 0.0
    return -rho_n, 180.0 - theta_n_deg


def _to_normal_angle(rho: float, theta: float) -> tuple[float, float]:
    if theta <= 0.0:
        return rho, -theta
    return -rho, 180.0 - theta


def hough_lines(edges: np.ndarray, params: HoughParams = HoughParams()) -> list[PolarLine]:
    """Standard rho/theta voting over the edge map; returns peak lines.

    The accumulator spans normal angles [0, 180) at theta_res steps and
    rho in [-diag, diag] at rho_res steps (bin = round(rho / rho_res)).
    """
    edges = np.asarray(edges, dtype=bool)
    ys, xs = np.nonzero(edges)
    if len(ys) == 0:
        return []
    h, w = edges.shape
    n_theta = int(round(180.0 / params.theta_res))
    theta_deg = np.arange(n_theta, dtype=np.float64) * params.theta_res
    cos_t = np.cos(np.deg2rad(theta_deg))
    sin_t = np.sin(np.deg2rad(theta_deg))
    n_rho_half = int(math.ceil(math.hypot(w, h) / params.rho_res))
    acc = kernels.active.hough_accumulate(
        ys.astype(np.int32), xs.astype(np.int32), cos_t, sin_t, params.rho_res, n_rho_half
    )
    lines = []
    for votes, rbin, tbin in find_accumulator_peaks(acc, params.vote_threshold):
        rho_n = (rbin - n_rho_half) * params.rho_res
        rho, theta = _to_vertical_angle(rho_n, theta_deg[tbin])
        lines.append(PolarLine(rho=float(rho), theta=float(theta), votes=votes))
    return lines


def polar_to_lane(line: PolarLine) -> Lane:
    """Slope-intercept form of the line; vertical lines (theta 0) have none."""
    rho_n, theta_n = _to_normal_angle(line.rho, line.theta)
    s = math.sin(math.radians(theta_n))
    if s == 0.0:
        raise ParameterError(f"vertical line (theta={line.theta}) has no slope form")
    c = math.cos(math.radians(theta_n))
    return Lane(m=-c / s, b=rho_n / s)


def lane_to_polar(lane: Lane, votes: int = 0) -> PolarLine:
    """Inverse of polar_to_lane (normal angle in (0, 180))."""
    theta_n = math.degrees(math.atan2(1.0, -lane.m))
    rho_n = lane.b * math.sin(math.radians(theta_n))
    rho, theta = _to_vertical_angle(rho_n, theta_n)
    return PolarLine(rho=rho, theta=theta, votes=votes)


def classify_and_fit(lines: list[PolarLine]) -> LanePair:
    """Split lines into the left/right angle windows and average each group.

    Group reduction is the unweighted mean of slopes and intercepts; lines
    outside both windows are dropped; an empty group yields an absent lane.
    """
    left = [polar_to_lane(l) for l in lines if LEFT_WINDOW[0] <= l.theta <= LEFT_WINDOW[1]]
    right = [polar_to_lane(l) for l in lines if RIGHT_WINDOW[0] <= l.theta <= RIGHT_WINDOW[1]]

    def fit(group):
        if not group:
            return None
        return Lane(
            m=sum(l.m for l in group) / len(group),
            b=sum(l.b for l in group) / len(group),
        )

    return LanePair(left=fit(left), right=fit(right))


def lane_x_at(lane: Lane, y: float) -> float:
    """Column where the lane crosses row y."""
    if lane.m == 0.0:
        raise ParameterError("horizontal lane never crosses a row uniquely")
    return (y - lane.b) / lane.m


def draw_overlay(
    rgb: np.ndarray,
    pair: LanePair,
    ceiling_y: int,
    midpoint_x: float | None = None,
    setpoint_x: float | None = None,
) -> np.ndarray:
    """Copy of the frame with lanes in red plus midpoint/setpoint markers."""
    out = np.asarray(rgb, dtype=np.uint8).copy()
    h, w = out.shape[:2]
    for lane in (pair.left, pair.right):
        if lane is None or lane.m == 0.0:
            continue
        for y in range(ceiling_y, h):
            x = int(math.floor(lane_x_at(lane, y) + 0.5))
            if 0 <= x < w:
                out[y, max(0, x - 1) : min(w, x + 2)] = (255, 0, 0)

    def marker(x, color):
        xi = int(math.floor(x + 0.5))
        y0, y1 = max(0, ceiling_y - 4), min(h, ceiling_y + 5)
        out[y0:y1, max(0, xi - 4) : min(w, xi + 5)] = color

    if setpoint_x is not None:
        marker(setpoint_x, (64, 64, 255))
    if midpoint_x is not None:
        marker(midpoint_x, (0, 255, 0))
    return out
