"""Stateful per-frame perception: preprocessing, lane extraction, per-side
lane tracking, midpoint, and both position smoothers.

A raw midpoint needs both lanes in the current frame. When only one side
is found, the midpoint falls back to the lane trackers' predictions (both
must be live). A frame yields a wire value only when it produced a
measurement this way; frames with no usable detection stay silent, which
is what the controller-side watchdog counts.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import imaging, lanes, tracking, wire
from .config import RunConfig
from .errors import ParameterError
from .lanes import HoughParams, LanePair, PolarLine
from .position import PaaBuffer, PositionEstimate, lane_midpoint
from .render import PROC_WIDTH


@dataclass
class FrameResult:
    lanes_detected: int
    raw_pair: LanePair
    raw_polar: tuple[PolarLine | None, PolarLine | None]
    tracked_pair: LanePair
    raw_mid: float | None
    measurement: float | None
    paa: float | None
    kalman: float | None
    smoothed: float | None
    wire_value: int | None
    estimate: PositionEstimate | None
    gray: np.ndarray | None = None
    edges: np.ndarray | None = None


@dataclass
class StageTimer:
    totals: dict = field(default_factory=dict)
    _t0: float = 0.0

    def start(self):
        self._t0 = time.perf_counter()

    def mark(self, stage: str):
        now = time.perf_counter()
        self.totals[stage] = self.totals.get(stage, 0.0) + (now - self._t0)
        self._t0 = now


class LanePipeline:
    def __init__(self, cfg: RunConfig = RunConfig(), keep_images: bool = False):
        self.cfg = cfg
        self.keep_images = keep_images
        self.canny_params = imaging.CannyParams(
            low_threshold=cfg.canny_low,
            high_threshold=cfg.canny_high,
            blur_kernel=cfg.blur_kernel,
            blur_sigma=cfg.blur_sigma,
        )
        self.hough_params = HoughParams(
            rho_res=cfg.hough_rho_res,
            theta_res=cfg.hough_theta_res,
            vote_threshold=cfg.hough_votes,
        )
        lane_model = tracking.lane_tracker_model(
            q=(cfg.lane_q_rho, cfg.lane_q_theta, cfg.lane_q_rho_rate, cfg.lane_q_theta_rate),
            r=(cfg.lane_r_rho, cfg.lane_r_theta),
        )
        self.left_track = tracking.LaneTrack(
            lane_model, init_var=cfg.init_var, miss_limit=cfg.miss_limit
        )
        self.right_track = tracking.LaneTrack(
            lane_model, init_var=cfg.init_var, miss_limit=cfg.miss_limit
        )
        self.position_track = tracking.PositionTrack(
            tracking.position_tracker_model(q=(cfg.pos_q_x, cfg.pos_q_rate), r=cfg.pos_r),
            init_var=cfg.init_var,
            miss_limit=cfg.miss_limit,
        )
        self.paa = PaaBuffer(cfg.paa_size)

    def preprocess(self, rgb: np.ndarray, timer: StageTimer | None = None) -> tuple:
        """RGB frame -> (processing-scale gray, masked edge map)."""
        if timer:
            timer.start()
        gray = imaging.to_grayscale(rgb)
        if timer:
            timer.mark("grayscale")
        while gray.shape[1] > PROC_WIDTH:
            gray = imaging.downsample_half(gray)
            if timer:
                timer.mark("downsample")
        blurred = imaging.gaussian_blur(gray, self.cfg.blur_kernel, self.cfg.blur_sigma)
        if timer:
            timer.mark("blur")
        edges = imaging.canny(blurred, self.canny_params)
        if timer:
            timer.mark("canny")
        edges = imaging.roi_mask(edges)
        if timer:
            timer.mark("roi")
        return gray, edges

    def process(self, rgb: np.ndarray, timer: StageTimer | None = None) -> FrameResult:
        gray, edges = self.preprocess(rgb, timer)
        ceiling = imaging.roi_ceiling(edges.shape[0])
        if timer:
            timer.start()
        lines = lanes.hough_lines(edges, self.hough_params)
        if timer:
            timer.mark("hough")
        raw_pair = lanes.classify_and_fit(lines)
        if timer:
            timer.mark("classify")

        raw_polar = (
            None if raw_pair.left is None else lanes.lane_to_polar(raw_pair.left),
            None if raw_pair.right is None else lanes.lane_to_polar(raw_pair.right),
        )
        tracked = []
        for track, polar in zip((self.left_track, self.right_track), raw_polar):
            est = track.step(None if polar is None else (polar.rho, polar.theta))
            tracked.append(self._estimate_to_lane(est) if track.live else None)
        tracked_pair = LanePair(left=tracked[0], right=tracked[1])
        if timer:
            timer.mark("track")

        lanes_detected = raw_pair.count
        raw_mid = lane_midpoint(raw_pair, ceiling)
        measurement = raw_mid
        if measurement is None and lanes_detected >= 1:
            # partial detection: trust the per-side trackers to fill the gap
            if tracked_pair.left is not None and tracked_pair.right is not None:
                try:
                    measurement = lane_midpoint(tracked_pair, ceiling)
                except ParameterError:  # a track drifted onto the horizontal
                    measurement = None

        if measurement is not None:
            paa_val = self.paa.update(measurement)
        else:
            paa_val = self.paa.peek()
        was_seeded = self.position_track.seeded
        kf_val = self.position_track.step(measurement)
        if measurement is None and not was_seeded:
            kf_val = None
        if timer:
            timer.mark("position")

        smoothed = kf_val if self.cfg.smoother == "kalman" else paa_val
        wire_value = None
        if measurement is not None and smoothed is not None:
            wire_value = wire.map_position(smoothed)
        estimate = None
        if smoothed is not None:
            estimate = PositionEstimate(
                raw=raw_mid,
                smoothed=smoothed,
                method=self.cfg.smoother,
                lanes_detected=lanes_detected,
            )
        return FrameResult(
            lanes_detected=lanes_detected,
            raw_pair=raw_pair,
            raw_polar=raw_polar,
            tracked_pair=tracked_pair,
            raw_mid=raw_mid,
            measurement=measurement,
            paa=paa_val,
            kalman=kf_val,
            smoothed=smoothed,
            wire_value=wire_value,
            estimate=estimate,
            gray=gray if self.keep_images else None,
            edges=edges if self.keep_images else None,
        )

    @staticmethod
    def _estimate_to_lane(est):
        rho, theta = est
        line = PolarLine(rho=rho, theta=theta)
        # a track drifting onto the vertical axis has no slope form
        try:
            return lanes.polar_to_lane(line)
        except ParameterError:
            return None
