"""Frame preprocessing: grayscale, half downsample, Gaussian blur, Canny, ROI.

All functions are pure; frames are uint8 NumPy arrays (gray (h, w), color
(h, w, 3)) and edge maps are boolean (h, w). Rounding is half away from
zero throughout (floor(x + 0.5) on non-negative values).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionError, ParameterError


@dataclass(frozen=True)
class CannyParams:
    low_threshold: float = 50.0
    high_threshold: float = 150.0
    blur_kernel: int = 5
    blur_sigma: float = 1.0

    def __post_init__(self):
        if not (0 < self.low_threshold <= self.high_threshold):
            raise ParameterError(
                f"need 0 < low <= high, got {self.low_threshold}, {self.high_threshold}"
            )
        if self.blur_kernel < 3 or self.blur_kernel % 2 == 0:
            raise ParameterError(f"blur kernel must be odd >= 3, got {self.blur_kernel}")
        if self.blur_sigma <= 0:
            raise ParameterError(f"blur sigma must be positive, got {self.blur_sigma}")


def _check_gray(frame: np.ndarray) -> np.ndarray:
    frame = np.asarray(frame)
    if frame.ndim != 2:
        raise DimensionError(f"expected (h, w) gray frame, got shape {frame.shape}")
    return frame.astype(np.uint8, copy=False)


def to_grayscale(frame: np.ndarray) -> np.ndarray:
    """BT.601 luma: round(0.299 R + 0.587 G + 0.114 B) per pixel."""
    frame = np.asarray(frame)
    if frame.ndim != 3 or frame.shape[2] != 3:
        raise DimensionError(f"expected (h, w, 3) color frame, got shape {frame.shape}")
    return kernels.active.rgb_to_gray(frame.astype(np.uint8, copy=False))


def downsample_half(frame: np.ndarray) -> np.ndarray:
    """Halve both dimensions; each output pixel is the rounded 2x2 block mean."""
    frame = _check_gray(frame)
    h, w = frame.shape
    if h % 2 or w % 2:
        raise DimensionError(f"dimensions must be even to halve, got {w}x{h}")
    return kernels.active.downsample2(frame)


def gaussian_weights(kernel: int, sigma: float) -> np.ndarray:
    """1-d taps g(i) ~ exp(-i^2 / (2 sigma^2)), normalized to sum 1."""
    if kernel < 3 or kernel % 2 == 0:
        raise ParameterError(f"kernel must be odd >= 3, got {kernel}")
    if sigma <= 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    r = kernel // 2
    i = np.arange(-r, r + 1, dtype=np.float64)
    w = np.exp(-(i * i) / (2.0 * sigma * sigma))
    return w / w.sum()


def gaussian_blur(frame: np.ndarray, kernel: int = 5, sigma: float = 1.0) -> np.ndarray:
    """Separable Gaussian with replicated borders; one rounding at the end."""
    frame = _check_gray(frame)
    return kernels.active.gaussian_blur(frame, gaussian_weights(kernel, sigma))


def canny(frame: np.ndarray, params: CannyParams) -> np.ndarray:
    """Edge detection on an already-blurred frame.

    3x3 Sobel gradients; magnitude sqrt(gx^2 + gy^2) / 4 so an ideal
    full-range step peaks at 255; direction quantized to 4 bins with
    boundary ties rounding to the lower bin; non-maximum suppression that
    thins plateaus to the raster-earliest pixel; double-threshold
    hysteresis (strong >= high, weak in [low, high) kept when 8-connected
    to a strong pixel). The 1-px border has no defined gradient and is
    never an edge.
    """
    frame = _check_gray(frame)
    return kernels.active.canny(frame, params.low_threshold, params.high_threshold)


def roi_ceiling(height: int) -> int:
    """Top row of the region of interest (the bottom half of the frame)."""
    return height // 2


def roi_mask(edges: np.ndarray) -> np.ndarray:
    """Clear every row above the ROI ceiling; rows >= height/2 pass through."""
    edges = np.asarray(edges)
    if edges.ndim != 2:
        raise DimensionError(f"expected (h, w) edge map, got shape {edges.shape}")
    out = edges.astype(bool).copy()
    out[: roi_ceiling(out.shape[0]), :] = False
    return out
