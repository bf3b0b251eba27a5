import numpy as np
import pytest

from lanekeep.config import RunConfig
from lanekeep.control import HALT, DriveCommand
from lanekeep.sim import (
    PlantParams,
    TelemetryLog,
    VehiclePose,
    run_closed_loop,
    vehicle_step,
)
from lanekeep.track import Segment, TrackSpec

STRAIGHT = TrackSpec(segments=(Segment(6.0, 0.0),), lane_width=0.45)
CURVE = TrackSpec(
    segments=(
        Segment(1.5, 0.0),
        Segment(3.0, 0.2),
        Segment(1.5, 0.0),
        Segment(3.0, -0.2),
        Segment(1.5, 0.0),
    ),
    lane_width=0.45,
)
PLANT = PlantParams()


def test_vehicle_step_straight():
    pose = VehiclePose()
    out = vehicle_step(pose, DriveCommand(100.0, 100.0), PLANT)
    v = 0.004 * 100.0
    assert out.heading == 0.0
    assert out.x == pytest.approx(v * PLANT.frame_dt)
    assert out.y == 0.0
    assert out.t == pytest.approx(PLANT.frame_dt)


def test_vehicle_step_turn_rate():
    out = vehicle_step(VehiclePose(), DriveCommand(150.0, 50.0), PLANT)
    # v_l = 0.6, v_r = 0.2 -> omega = (0.2 - 0.6) / 0.3 = -4/3 rad/s
    assert out.heading == pytest.approx(-4.0 / 3.0 * PLANT.frame_dt)


def test_vehicle_step_halted():
    pose = VehiclePose(x=1.0, y=2.0, heading=0.5, t=3.0)
    out = vehicle_step(pose, HALT, PLANT)
    assert (out.x, out.y, out.heading) == (1.0, 2.0, 0.5)
    assert out.t == pytest.approx(3.0 + PLANT.frame_dt)


def test_vehicle_step_heading_normalized():
    pose = VehiclePose(heading=3.1)
    out = vehicle_step(pose, DriveCommand(50.0, 150.0), PLANT)
    assert -np.pi < out.heading <= np.pi


def test_constant_pwm_traces_turning_circle():
    cmd = DriveCommand(120.0, 80.0)
    v = 0.004 * 100.0
    omega = (0.004 * 80.0 - 0.004 * 120.0) / PLANT.wheel_base
    radius = v / abs(omega)
    pose = VehiclePose()
    pts = []
    for _ in range(1000):
        pose = vehicle_step(pose, cmd, PLANT)
        pts.append((pose.x, pose.y))
    pts = np.array(pts)

    def circumcenter(a, b, c):
        ax, ay = a
        bx, by = b
        cx, cy = c
        d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
        ux = ((ax**2 + ay**2) * (by - cy) + (bx**2 + by**2) * (cy - ay)
              + (cx**2 + cy**2) * (ay - by)) / d
        uy = ((ax**2 + ay**2) * (cx - bx) + (bx**2 + by**2) * (ax - cx)
              + (cx**2 + cy**2) * (bx - ax)) / d
        return ux, uy

    cx, cy = circumcenter(pts[0], pts[23], pts[47])
    radii = np.hypot(pts[:, 0] - cx, pts[:, 1] - cy)
    assert np.all(np.abs(radii - radius) / radius < 0.02)


def test_closed_loop_zero_frames():
    log = run_closed_loop(STRAIGHT, RunConfig(), n_frames=0)
    assert log.rows == [] and log.outcome == "max_frames"


def test_closed_loop_completes_straight():
    log = run_closed_loop(STRAIGHT, RunConfig())
    assert log.completed
    assert log.max_abs_offset < STRAIGHT.lane_width / 4.0


def test_closed_loop_recovers_from_offset_start():
    log = run_closed_loop(STRAIGHT, RunConfig(), initial_pose=VehiclePose(y=0.05))
    assert log.completed
    # feedback pulls the vehicle back toward the centerline
    assert abs(log.rows[-1].lateral_offset) < 0.02


def test_closed_loop_completes_curve():
    log = run_closed_loop(CURVE, RunConfig())
    assert log.completed
    assert log.max_abs_offset < CURVE.lane_width / 2.0


def test_closed_loop_survives_short_dropouts():
    cfg = RunConfig(dropouts="30-34,70-74,110-114")
    log = run_closed_loop(CURVE, cfg)
    assert log.completed
    assert log.max_abs_offset < CURVE.lane_width / 2.0
    for lo, hi in ((30, 34), (70, 74), (110, 114)):
        assert all(log.rows[i].wire_value is None for i in range(lo, hi + 1))
    # drive command is held through the gaps
    held = {(log.rows[i].left_pwm, log.rows[i].right_pwm) for i in range(30, 35)}
    assert held == {(log.rows[29].left_pwm, log.rows[29].right_pwm)}


def test_closed_loop_watchdog_stops_on_long_dropout():
    cfg = RunConfig(dropouts="40-49")
    log = run_closed_loop(CURVE, cfg)
    assert log.outcome == "stopped(watchdog)"
    assert log.rows[-1].frame == 47  # the eighth missed frame
    assert (log.rows[-1].left_pwm, log.rows[-1].right_pwm) == (0.0, 0.0)
    for row in log.rows[40:47]:
        assert not (row.left_pwm == 0.0 and row.right_pwm == 0.0)


def test_closed_loop_zero_gains_departs_curve():
    log = run_closed_loop(CURVE, RunConfig(kp=0.0, ki=0.0, kd=0.0))
    assert log.outcome == "departed"


def test_closed_loop_deterministic_csv():
    cfg = RunConfig(dropouts="20-22", noise=0.001, seed=11)
    a = run_closed_loop(STRAIGHT, cfg).to_csv()
    b = run_closed_loop(STRAIGHT, cfg).to_csv()
    assert a == b


def test_telemetry_csv_shape():
    log = run_closed_loop(STRAIGHT, RunConfig(), n_frames=5)
    text = log.to_csv()
    lines = text.strip().split("\n")
    assert lines[0] == "frame,raw_mid,paa,kalman,wire_value,left_pwm,right_pwm,lateral_offset,heading_error"
    assert len(lines) == 6
    assert lines[1].split(",")[0] == "0"


def test_wire_stream_recorded():
    log = run_closed_loop(STRAIGHT, RunConfig(), n_frames=20)
    assert len(log.wire_stream) > 0
    assert log.wire_stream.count(b"\n") == sum(
        1 for i, r in enumerate(log.rows)
        if r.wire_value is not None
        and (i == 0 or r.wire_value != next(
            (p.wire_value for p in reversed(log.rows[:i]) if p.wire_value is not None),
            None,
        ))
    )


def test_telemetry_log_empty_max_offset():
    log = TelemetryLog(rows=[], outcome="max_frames", lane_width=0.45)
    assert log.max_abs_offset == 0.0
