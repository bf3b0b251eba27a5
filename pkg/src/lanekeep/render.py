"""Synthetic road frames: flat-ground pinhole projection of the lane
boundaries, rasterized as bright stripes on a dark background.

The camera model is expressed at the 320x240 processing scale; frames are
rendered at 640x480 (twice the scale) so the preprocessing chain exercises
the same halving step a real capture would.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .track import Centerline

PROC_WIDTH, PROC_HEIGHT = 320, 240
RENDER_SCALE = 2
BACKGROUND = 10
MARKER = 255
# half of the 3-px processing-scale stripe width
STRIPE_RADIUS = 1.5


@dataclass(frozen=True)
class CameraModel:
    mount_height: float = 0.25  # meters above ground
    tilt: float = math.radians(15.0)  # radians below horizon
    focal: float = 250.0  # pixels at processing scale

    def __post_init__(self):
        if self.mount_height <= 0:
            raise ParameterError(f"camera height must be positive, got {self.mount_height}")
        if not (0.0 < self.tilt < math.pi / 2):
            raise ParameterError("camera tilt must be in (0, pi/2) below horizon")
        if self.focal <= 0:
            raise ParameterError(f"focal length must be positive, got {self.focal}")


def _stamp_offsets(radius: float) -> np.ndarray:
    r = int(math.ceil(radius))
    dy, dx = np.mgrid[-r : r + 1, -r : r + 1]
    keep = dy * dy + dx * dx <= radius * radius
    return np.stack([dy[keep], dx[keep]], axis=1)


_OFFSET_CACHE: dict[int, np.ndarray] = {}


def _offsets_for(scale: int) -> np.ndarray:
    if scale not in _OFFSET_CACHE:
        _OFFSET_CACHE[scale] = _stamp_offsets(STRIPE_RADIUS * scale)
    return _OFFSET_CACHE[scale]


def project_points(points_xy: np.ndarray, pose, cam: CameraModel,
                   scale: int = RENDER_SCALE) -> np.ndarray:
    """World ground points -> render-scale pixel coordinates (u, v).

    Points behind the camera or on the horizon side get NaN.
    """
    px, py, heading = pose
    dx = points_xy[:, 0] - px
    dy = points_xy[:, 1] - py
    cos_h, sin_h = math.cos(heading), math.sin(heading)
    forward = cos_h * dx + sin_h * dy
    lateral = -sin_h * dx + cos_h * dy  # left positive
    cos_t, sin_t = math.cos(cam.tilt), math.sin(cam.tilt)
    z_c = cam.mount_height * sin_t + forward * cos_t
    y_c = forward * sin_t - cam.mount_height * cos_t
    x_c = -lateral
    f = cam.focal * scale
    cx = (PROC_WIDTH * scale - 1) / 2.0
    cy = (PROC_HEIGHT * scale - 1) / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        u = cx + f * x_c / z_c
        v = cy - f * y_c / z_c
    bad = z_c <= 1e-6
    u[bad] = np.nan
    v[bad] = np.nan
    return np.stack([u, v], axis=1)


def render_scene(
    pose,
    centerline: Centerline,
    cam: CameraModel,
    frame_index: int,
    *,
    s_along: float | None = None,
    dropout: bool = False,
    noise: float = 0.0,
    seed: int = 0,
    scale: int = RENDER_SCALE,
) -> np.ndarray:
    """Render one RGB frame of the road ahead of `pose` (640x480 at the
    default scale 2; scale 1 gives processing-resolution 320x240 frames).

    `s_along` is the vehicle's centerline arclength (defaults to a fresh
    projection); `dropout` skips the markers entirely; `noise` flips the
    given fraction of pixels between background and marker brightness.
    """
    h = PROC_HEIGHT * scale
    w = PROC_WIDTH * scale
    img = np.full((h, w), BACKGROUND, dtype=np.uint8)
    px, py, heading = pose
    if s_along is None:
        s_along, _, _ = centerline.project(px, py, 0.0, back=0.0,
                                           forward=centerline.total_length)
    if not dropout:
        # near samples hit the bottom rows where magnification is largest
        s_samples = np.concatenate(
            [
                np.arange(s_along - 0.3, s_along + 1.0, 0.001),
                np.arange(s_along + 1.0, s_along + 4.0, 0.004),
            ]
        )
        poses = [centerline.pose_at(s) for s in s_samples]
        half = 0.5 * centerline.track.lane_width
        offsets = _offsets_for(scale)
        for side in (1.0, -1.0):
            pts = np.array(
                [
                    (x - side * half * math.sin(hd), y + side * half * math.cos(hd))
                    for x, y, hd in poses
                ]
            )
            uv = project_points(pts, (px, py, heading), cam, scale=scale)
            uv = uv[~np.isnan(uv).any(axis=1)]
            if len(uv) == 0:
                continue
            pix = np.floor(uv + 0.5).astype(np.int64)
            on = (pix[:, 0] >= -4) & (pix[:, 0] < w + 4) & (pix[:, 1] >= -4) & (pix[:, 1] < h + 4)
            pix = pix[on]
            if len(pix) == 0:
                continue
            stamped = pix[:, None, :] + offsets[None, :, ::-1]  # offsets are (dy, dx)
            stamped = stamped.reshape(-1, 2)
            ok = (
                (stamped[:, 0] >= 0)
                & (stamped[:, 0] < w)
                & (stamped[:, 1] >= 0)
                & (stamped[:, 1] < h)
            )
            stamped = stamped[ok]
            img[stamped[:, 1], stamped[:, 0]] = MARKER
    if noise > 0.0:
        rng = np.random.default_rng([seed & 0xFFFFFFFF, frame_index])
        flips = rng.random((h, w)) < noise
        img = np.where(flips, np.where(img > 128, BACKGROUND, MARKER), img).astype(np.uint8)
    return np.repeat(img[:, :, None], 3, axis=2)
