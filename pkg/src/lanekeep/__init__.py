"""Lane keeping at desk scale.

Perception (grayscale, blur, Canny, Hough, lane classification), per-lane
and position Kalman tracking, sliding-window smoothing, a two-byte serial
position protocol, PID differential-drive steering, and a closed-loop
synthetic road simulator tying it all together.
"""

from . import kernels
from .config import RunConfig, dump_config, load_config, parse_config
from .control import Controller, DriveCommand, PidGains
from .lanes import HoughParams, Lane, LanePair, PolarLine
from .pipeline import LanePipeline
from .sim import TelemetryLog, VehiclePose, run_closed_loop, vehicle_step
from .track import Segment, TrackSpec, load_track, parse_track

__version__ = "0.1.0"

__all__ = [
    "Controller",
    "DriveCommand",
    "HoughParams",
    "Lane",
    "LanePair",
    "LanePipeline",
    "PidGains",
    "PolarLine",
    "RunConfig",
    "Segment",
    "TelemetryLog",
    "TrackSpec",
    "VehiclePose",
    "dump_config",
    "kernels",
    "load_config",
    "load_track",
    "parse_config",
    "parse_track",
    "run_closed_loop",
    "vehicle_step",
]
