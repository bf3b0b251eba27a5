"""Controller-side logic: PID on position error, differential PWM mixing
around a base duty, and the eight-frame no-lane stop watchdog."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError
from .wire import unmap_position

DEFAULT_BASE_PWM = 100.0
DEFAULT_MAX_PWM = 255.0
DEFAULT_INTEGRAL_LIMIT = 500.0
MISS_LIMIT = 8
NOMINAL_DT = 1.0 / 6.0  # nominal frame period


@dataclass(frozen=True)
class PidGains:
    kp: float = 1.2
    ki: float = 0.0
    kd: float = 0.3

    def __post_init__(self):
        for g in (self.kp, self.ki, self.kd):
            if not (math.isfinite(g) and g >= 0.0):
                raise ParameterError(f"gains must be finite and >= 0, got {g}")


class PidController:
    """Classic PID with a clamped integral and first-call derivative of 0."""

    def __init__(self, gains: PidGains, integral_limit: float = DEFAULT_INTEGRAL_LIMIT):
        self.gains = gains
        self.integral_limit = integral_limit
        self.integral = 0.0
        self.prev_error = 0.0
        self.initialized = False

    def reset(self) -> None:
        self.integral = 0.0
        self.prev_error = 0.0
        self.initialized = False

    def step(self, error: float, dt: float) -> float:
        if dt <= 0.0:
            raise ParameterError(f"dt must be positive, got {dt}")
        self.integral += error * dt
        self.integral = min(max(self.integral, -self.integral_limit), self.integral_limit)
        derivative = (error - self.prev_error) / dt if self.initialized else 0.0
        self.prev_error = error
        self.initialized = True
        g = self.gains
        return g.kp * error + g.ki * self.integral + g.kd * derivative


def compute_error(setpoint_x: float, current_x: float) -> float:
    return setpoint_x - current_x


@dataclass(frozen=True)
class DriveCommand:
    left_pwm: float
    right_pwm: float
    halted: bool = False


def mix_drive(u: float, base: float = DEFAULT_BASE_PWM,
              max_pwm: float = DEFAULT_MAX_PWM) -> DriveCommand:
    """base + u on the left motor, base - u on the right, both clamped."""
    if not (0.0 <= base <= max_pwm):
        raise ParameterError(f"base {base} outside [0, {max_pwm}]")
    left = min(max(base + u, 0.0), max_pwm)
    right = min(max(base - u, 0.0), max_pwm)
    return DriveCommand(left_pwm=left, right_pwm=right, halted=False)


HALT = DriveCommand(left_pwm=0.0, right_pwm=0.0, halted=True)


class Watchdog:
    """Counts consecutive no-lane frames; trips at the miss limit."""

    def __init__(self, miss_limit: int = MISS_LIMIT):
        self.miss_limit = miss_limit
        self.consecutive_misses = 0

    def step(self, lanes_detected: bool) -> bool:
        """Returns True when the vehicle must stop."""
        if lanes_detected:
            self.consecutive_misses = 0
        else:
            self.consecutive_misses = min(self.consecutive_misses + 1, self.miss_limit)
        return self.consecutive_misses >= self.miss_limit


class Controller:
    """One tick per frame period, fed the decoded wire value if one exists.

    A missing value counts as a watchdog miss; below the miss limit the
    previous drive command is held (the link carries positions only when a
    lane was seen, so silence means "steer as before" until the watchdog
    says stop). steer_polarity flips which motor the PID output is added
    to; -1 steers back toward center with the default camera geometry.
    """

    def __init__(
        self,
        gains: PidGains = PidGains(),
        setpoint_x: float = 160.0,
        base_pwm: float = DEFAULT_BASE_PWM,
        max_pwm: float = DEFAULT_MAX_PWM,
        steer_polarity: int = -1,
        integral_limit: float = DEFAULT_INTEGRAL_LIMIT,
        miss_limit: int = MISS_LIMIT,
    ):
        if steer_polarity not in (-1, 1):
            raise ParameterError(f"steer_polarity must be -1 or 1, got {steer_polarity}")
        self.pid = PidController(gains, integral_limit)
        self.watchdog = Watchdog(miss_limit)
        self.setpoint_x = setpoint_x
        self.base_pwm = base_pwm
        self.max_pwm = max_pwm
        self.steer_polarity = steer_polarity
        self.last_command = HALT  # nothing received yet: do not move

    def tick(self, decoded: int | None, dt: float = NOMINAL_DT) -> DriveCommand:
        stop = self.watchdog.step(decoded is not None)
        if stop:
            self.pid.reset()
            self.last_command = HALT
            return HALT
        if decoded is None:
            return self.last_command
        x = unmap_position(decoded)
        u = self.pid.step(compute_error(self.setpoint_x, x), dt)
        self.last_command = mix_drive(self.steer_polarity * u, self.base_pwm, self.max_pwm)
        return self.last_command
