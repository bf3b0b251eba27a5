"""Pure NumPy kernel backend.

Mirrors the compiled backend operation-for-operation: same accumulation
order, same rounding (half away from zero via floor(x + 0.5)), same tie
rules, so outputs are bit-identical between the two.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

NAME = "pure"

# tan(22.5 deg) and tan(67.5 deg): gradient direction bin boundaries
_T1 = 0.41421356237309503
_T2 = 2.414213562373095


def rgb_to_gray(rgb: np.ndarray) -> np.ndarray:
    r = rgb[:, :, 0].astype(np.float64)
    g = rgb[:, :, 1].astype(np.float64)
    b = rgb[:, :, 2].astype(np.float64)
    y = r * 0.299 + g * 0.587 + b * 0.114
    return np.floor(y + 0.5).astype(np.uint8)


def downsample2(gray: np.ndarray) -> np.ndarray:
    h, w = gray.shape
    g = gray.astype(np.uint32)
    s = g[0::2, 0::2] + g[0::2, 1::2] + g[1::2, 0::2] + g[1::2, 1::2]
    return np.floor(s * 0.25 + 0.5).astype(np.uint8)


def gaussian_blur(gray: np.ndarray, weights: np.ndarray) -> np.ndarray:
    h, w = gray.shape
    k = len(weights)
    r = k // 2
    src = gray.astype(np.float64)
    # horizontal pass, replicate borders, taps accumulated in kernel order
    padded = np.pad(src, ((0, 0), (r, r)), mode="edge")
    horiz = np.zeros((h, w), dtype=np.float64)
    for i in range(k):
        horiz += weights[i] * padded[:, i : i + w]
    padded = np.pad(horiz, ((r, r), (0, 0)), mode="edge")
    out = np.zeros((h, w), dtype=np.float64)
    for i in range(k):
        out += weights[i] * padded[i : i + h, :]
    return np.floor(out + 0.5).astype(np.uint8)


def _sobel(gray: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    g = gray.astype(np.int32)
    gx = np.zeros_like(g)
    gy = np.zeros_like(g)
    c, n, s = g[1:-1, :], g[:-2, :], g[2:, :]
    gx[1:-1, 1:-1] = (
        (n[:, 2:] + 2 * c[:, 2:] + s[:, 2:]) - (n[:, :-2] + 2 * c[:, :-2] + s[:, :-2])
    )
    m, w, e = g[:, 1:-1], g[:, :-2], g[:, 2:]
    gy[1:-1, 1:-1] = (
        (w[2:, :] + 2 * m[2:, :] + e[2:, :]) - (w[:-2, :] + 2 * m[:-2, :] + e[:-2, :])
    )
    return gx, gy


def _direction_bins(gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    """Quantize gradient direction to 4 bins: 0=E/W, 1=45deg, 2=N/S, 3=135deg.

    Boundary ties round toward the lower angle bin.
    """
    ax = np.abs(gx).astype(np.float64)
    ay = np.abs(gy).astype(np.float64)
    p = gx * gy  # sign decides 45 vs 135; magnitudes fit int32
    t1ax = _T1 * ax
    t2ax = _T2 * ax
    bins = np.full(gx.shape, 2, dtype=np.int8)  # default: ay > t2ax
    mid = (ay > t1ax) & (ay < t2ax)
    bins[ay < t1ax] = 0
    bins[(ay == t1ax) & (p >= 0)] = 0
    bins[(ay == t1ax) & (p < 0)] = 3
    bins[mid & (p > 0)] = 1
    bins[mid & (p <= 0)] = 3
    bins[(ay == t2ax) & (p > 0)] = 1
    bins[(ay == t2ax) & (p <= 0)] = 2
    return bins


# NMS neighbor offsets per direction bin: (raster-earlier, raster-later)
_NMS_OFFSETS = {
    0: ((0, -1), (0, 1)),
    1: ((-1, -1), (1, 1)),
    2: ((-1, 0), (1, 0)),
    3: ((-1, 1), (1, -1)),
}


def canny(gray: np.ndarray, low: float, high: float) -> np.ndarray:
    h, w = gray.shape
    edges = np.zeros((h, w), dtype=bool)
    if h < 3 or w < 3:
        return edges
    gx, gy = _sobel(gray)
    mag = np.sqrt((gx * gx + gy * gy).astype(np.float64)) * 0.25
    mag[0, :] = mag[-1, :] = 0.0
    mag[:, 0] = mag[:, -1] = 0.0
    bins = _direction_bins(gx, gy)

    # non-maximum suppression: keep a pixel iff it beats the raster-earlier
    # neighbor strictly and the raster-later neighbor at least, which thins
    # two-pixel plateaus (e.g. an ideal step) to a single column
    kept = np.zeros((h, w), dtype=bool)
    inner = np.s_[1 : h - 1, 1 : w - 1]
    for d, ((r0, c0), (r1, c1)) in _NMS_OFFSETS.items():
        sel = bins[inner] == d
        m = mag[inner]
        before = mag[1 + r0 : h - 1 + r0, 1 + c0 : w - 1 + c0]
        after = mag[1 + r1 : h - 1 + r1, 1 + c1 : w - 1 + c1]
        kept[inner] |= sel & (m > before) & (m >= after)

    candidates = kept & (mag >= low)
    strong = kept & (mag >= high)
    if not strong.any():
        return edges
    # hysteresis: keep candidates 8-connected to a strong pixel
    labels, _ = ndimage.label(candidates, structure=np.ones((3, 3), dtype=np.int8))
    good = np.unique(labels[strong])
    edges = candidates & np.isin(labels, good)
    return edges


def hough_accumulate(
    ys: np.ndarray,
    xs: np.ndarray,
    cos_t: np.ndarray,
    sin_t: np.ndarray,
    rho_res: float,
    n_rho_half: int,
) -> np.ndarray:
    n_theta = len(cos_t)
    n_rho = 2 * n_rho_half + 1
    acc = np.zeros((n_rho, n_theta), dtype=np.int32)
    xf = xs.astype(np.float64)
    yf = ys.astype(np.float64)
    inv = 1.0 / rho_res
    for t in range(n_theta):
        rho = xf * cos_t[t] + yf * sin_t[t]
        b = np.floor(rho * inv + 0.5).astype(np.int64) + n_rho_half
        acc[:, t] += np.bincount(b, minlength=n_rho).astype(np.int32)
    return acc
