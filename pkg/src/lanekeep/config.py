"""Flat `key = value` run configuration.

One document holds every tunable: preprocessing thresholds, Hough
quantization, tracker covariances, smoother selection, PID gains, plant
and camera parameters, and the seed. Unknown keys are rejected; every
key has a default. `#` starts a comment.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .errors import ConfigError


@dataclass(frozen=True)
class RunConfig:
    # preprocessing
    blur_kernel: int = 5
    blur_sigma: float = 1.0
    canny_low: float = 50.0
    canny_high: float = 150.0
    # Hough quantization
    hough_rho_res: float = 1.0
    hough_theta_res: float = 1.0
    hough_votes: int = 30
    # lane tracker (rho, theta, and their per-frame rates)
    lane_q_rho: float = 0.1
    lane_q_theta: float = 0.01
    lane_q_rho_rate: float = 0.1
    lane_q_theta_rate: float = 0.01
    lane_r_rho: float = 4.0
    lane_r_theta: float = 1.0
    # position tracker
    pos_q_x: float = 1.0
    pos_q_rate: float = 0.1
    pos_r: float = 9.0
    init_var: float = 100.0
    miss_limit: int = 8
    # position smoothing
    paa_size: int = 8
    smoother: str = "kalman"  # "paa" or "kalman"
    setpoint_x: float = 160.0
    # controller
    kp: float = 1.2
    ki: float = 0.0
    kd: float = 0.3
    base_pwm: float = 100.0
    max_pwm: float = 255.0
    integral_limit: float = 500.0
    steer_polarity: int = -1
    # plant and camera
    wheel_base: float = 0.3
    pwm_to_speed: float = 0.004
    frame_dt: float = 1.0 / 6.0
    cam_height: float = 0.25
    cam_tilt_deg: float = 15.0
    cam_focal: float = 250.0
    # scenario
    noise: float = 0.0
    dropouts: str = ""  # inclusive frame ranges, e.g. "40-44,90-94"
    channel_loss: float = 0.0
    max_frames: int = 5000
    seed: int = 0

    def __post_init__(self):
        if self.smoother not in ("paa", "kalman"):
            raise ConfigError(f"smoother must be 'paa' or 'kalman', got {self.smoother!r}")
        if self.steer_polarity not in (-1, 1):
            raise ConfigError(f"steer_polarity must be -1 or 1, got {self.steer_polarity}")

    def dropout_ranges(self) -> list[tuple[int, int]]:
        ranges = []
        if not self.dropouts.strip():
            return ranges
        for part in self.dropouts.split(","):
            part = part.strip()
            try:
                if "-" in part:
                    a, b = part.split("-", 1)
                    lo, hi = int(a), int(b)
                else:
                    lo = hi = int(part)
            except ValueError:
                raise ConfigError(f"bad dropout range {part!r}") from None
            if hi < lo:
                raise ConfigError(f"bad dropout range {part!r}")
            ranges.append((lo, hi))
        return ranges

    def frame_dropped(self, index: int) -> bool:
        return any(lo <= index <= hi for lo, hi in self.dropout_ranges())


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    values = dataclasses.asdict(base) if base is not None else {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _FIELDS:
            raise ConfigError(f"line {line_no}: unknown key {key!r}")
        typ = _FIELDS[key].type
        try:
            if typ == "int":
                values[key] = int(value)
            elif typ == "float":
                values[key] = float(value)
            else:
                values[key] = value
        except ValueError:
            raise ConfigError(f"line {line_no}: bad {typ} value {value!r} for {key}") from None
    return RunConfig(**values)


def load_config(path, base: RunConfig | None = None) -> RunConfig:
    with open(path, "r", encoding="utf-8") as f:
        return parse_config(f.read(), base=base)


def dump_config(cfg: RunConfig) -> str:
    lines = ["# lanekeep run configuration (all keys, current values)"]
    for f in dataclasses.fields(RunConfig):
        value = getattr(cfg, f.name)
        if isinstance(value, float):
            value = repr(value)
        lines.append(f"{f.name} = {value}")
    return "\n".join(lines) + "\n"
