"""Command-line surface: offline detection, closed-loop simulation, and
the throughput benchmark."""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from . import imaging, lanes, netpbm
from .bench import run_bench
from .config import RunConfig, dump_config, load_config
from .errors import FrameFormatError, LanekeepError
from .pipeline import LanePipeline
from .sim import run_closed_loop
from .track import load_track

DETECT_COLUMNS = (
    "frame",
    "rho_left",
    "theta_left",
    "rho_right",
    "theta_right",
    "raw_mid",
    "paa",
    "kalman",
)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def _effective_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        cfg = load_config(args.config, base=cfg)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.dump_config:
        Path(args.dump_config).write_text(dump_config(cfg), encoding="utf-8")
    return cfg


def _annotate(result, cfg: RunConfig):
    rgb = np.repeat(result.gray[:, :, None], 3, axis=2)
    ceiling = imaging.roi_ceiling(result.gray.shape[0])
    drawn = lanes.LanePair(
        left=result.raw_pair.left or result.tracked_pair.left,
        right=result.raw_pair.right or result.tracked_pair.right,
    )
    return lanes.draw_overlay(
        rgb, drawn, ceiling, midpoint_x=result.smoothed, setpoint_x=cfg.setpoint_x
    )


def cmd_detect(args) -> int:
    cfg = _effective_config(args)
    input_dir = Path(args.input_dir)
    out_dir = Path(args.out or "detect_out")
    out_dir.mkdir(parents=True, exist_ok=True)
    frames = sorted(
        p for p in input_dir.iterdir() if p.suffix.lower() in (".pgm", ".ppm")
    )
    pipeline = LanePipeline(cfg, keep_images=True)
    rows = [",".join(DETECT_COLUMNS)]
    status = 0
    for path in frames:
        try:
            frame = netpbm.read_frame(path)
        except (FrameFormatError, OSError) as exc:
            print(f"error: {path.name}: {exc}", file=sys.stderr)
            status = 2
            break
        if frame.ndim == 2:
            frame = np.repeat(frame[:, :, None], 3, axis=2)
        result = pipeline.process(frame)
        left, right = result.raw_polar
        rows.append(
            ",".join(
                _fmt(v)
                for v in (
                    path.name,
                    None if left is None else left.rho,
                    None if left is None else left.theta,
                    None if right is None else right.rho,
                    None if right is None else right.theta,
                    result.raw_mid,
                    result.paa,
                    result.kalman,
                )
            )
        )
        netpbm.write_ppm(out_dir / f"{path.stem}_annotated.ppm", _annotate(result, cfg))
    (out_dir / "detect.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    return status


def cmd_simulate(args) -> int:
    cfg = _effective_config(args)
    track = load_track(args.track_file)
    frames_dir = Path(args.frames_dir) if args.frames_dir else None
    if frames_dir:
        frames_dir.mkdir(parents=True, exist_ok=True)

    def callback(index, rgb, result, row):
        if frames_dir:
            netpbm.write_ppm(
                frames_dir / f"frame_{index:05d}.ppm", _annotate(result, cfg)
            )

    log = run_closed_loop(
        track, cfg, frame_callback=callback if frames_dir else None
    )
    out_csv = Path(args.out or "telemetry.csv")
    out_csv.write_text(log.to_csv(), encoding="utf-8")
    if args.dump_wire:
        Path(args.dump_wire).write_text(log.wire_stream.hex(" ") + "\n", encoding="utf-8")
    print(
        f"frames={len(log.rows)} outcome={log.outcome} "
        f"max_offset={log.max_abs_offset:.4f}"
    )
    return 0 if log.completed else 1


def cmd_bench(args) -> int:
    cfg = _effective_config(args)
    reports = run_bench(cfg, n_frames=args.frames)
    for report in reports:
        print(report.format())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lanekeep",
        description="Lane keeping at desk scale: detection, simulation, benchmark.",
    )
    parser.add_argument("--config", help="run configuration file (key = value lines)")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--out", help="output path (detect: directory; simulate: CSV)")
    parser.add_argument(
        "--dump-config", help="write the effective configuration to this path"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="run detection over a directory of PGM/PPM frames")
    p.add_argument("input_dir")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("simulate", help="drive a track file in the closed loop")
    p.add_argument("track_file")
    p.add_argument("--frames-dir", help="also dump annotated frames here")
    p.add_argument("--dump-wire", help="write the wire byte stream as hex")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="time the detection chain per kernel backend")
    p.add_argument("--frames", type=int, default=300)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (LanekeepError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
