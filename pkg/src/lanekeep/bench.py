"""Throughput benchmark of the detection chain.

Renders a batch of 320x240 frames once, then times grayscale through
position estimation (no rendering, no disk I/O) for every available
kernel backend so the compiled core and the pure fallback can be
compared directly.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .config import RunConfig
from .errors import ParameterError
from .pipeline import LanePipeline, StageTimer
from .render import render_scene
from .sim import camera_from_config
from .track import Centerline, Segment, TrackSpec

MIN_FRAMES = 30

BENCH_TRACK = TrackSpec(
    segments=(Segment(4.0, 0.0), Segment(6.0, 0.15), Segment(6.0, -0.15), Segment(4.0, 0.0)),
    lane_width=0.45,
)


@dataclass
class BenchReport:
    backend: str
    n_frames: int
    elapsed_s: float
    stage_ms: dict = field(default_factory=dict)
    wire_values: list = field(default_factory=list)

    @property
    def fps(self) -> float:
        return self.n_frames / self.elapsed_s

    def format(self) -> str:
        stages = "  ".join(f"{k}={v:.3f}" for k, v in self.stage_ms.items())
        return (
            f"backend={self.backend} frames={self.n_frames} "
            f"fps={self.fps:.1f}\n  per-frame ms: {stages}"
        )


def make_bench_frames(n_frames: int, cfg: RunConfig) -> list:
    """Deterministic 320x240 frames along the benchmark track, with small
    seeded pose perturbations so the workload is not one static image."""
    cam = camera_from_config(cfg)
    centerline = Centerline(BENCH_TRACK)
    rng = np.random.default_rng(cfg.seed)
    frames = []
    ds = (centerline.total_length - 1.5) / n_frames
    for i in range(n_frames):
        s = 0.25 + i * ds
        x, y, heading = centerline.pose_at(s)
        lat = float(rng.uniform(-0.05, 0.05))
        yaw = float(rng.uniform(-0.04, 0.04))
        pose = (x - lat * math.sin(heading), y + lat * math.cos(heading), heading + yaw)
        frames.append(
            render_scene(pose, centerline, cam, i, s_along=s, noise=cfg.noise,
                         seed=cfg.seed, scale=1)
        )
    return frames


def run_bench(cfg: RunConfig, n_frames: int = 300,
              backend_names: list | None = None) -> list[BenchReport]:
    if n_frames < MIN_FRAMES:
        raise ParameterError(f"need at least {MIN_FRAMES} frames, got {n_frames}")
    frames = make_bench_frames(n_frames, cfg)
    names = backend_names or sorted(kernels.available_backends())
    previous = kernels.active.NAME
    reports = []
    try:
        for name in names:
            kernels.set_active(name)
            pipeline = LanePipeline(cfg)
            timer = StageTimer()
            t0 = time.perf_counter()
            values = [pipeline.process(f, timer).wire_value for f in frames]
            elapsed = time.perf_counter() - t0
            reports.append(
                BenchReport(
                    backend=name,
                    n_frames=n_frames,
                    elapsed_s=elapsed,
                    stage_ms={k: 1000.0 * v / n_frames for k, v in timer.totals.items()},
                    wire_values=values,
                )
            )
    finally:
        kernels.set_active(previous)
    return reports
