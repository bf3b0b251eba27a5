# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Every function mirrors kernels/pure.py exactly: same accumulation order,
same rounding, same tie rules. Keep the two in lockstep; the parity tests
assert bit-identical outputs.
"""

import numpy as np

from libc.math cimport fabs, floor, sqrt
from libc.stdint cimport int32_t, int64_t, uint8_t

NAME = "compiled"

cdef double T1 = 0.41421356237309503  # tan(22.5 deg)
cdef double T2 = 2.414213562373095    # tan(67.5 deg)


def rgb_to_gray(object rgb_in):
    cdef const uint8_t[:, :, ::1] rgb = np.ascontiguousarray(rgb_in, dtype=np.uint8)
    cdef Py_ssize_t h = rgb.shape[0], w = rgb.shape[1], i, j
    out = np.empty((h, w), dtype=np.uint8)
    cdef uint8_t[:, ::1] o = out
    cdef double y
    for i in range(h):
        for j in range(w):
            y = rgb[i, j, 0] * 0.299 + rgb[i, j, 1] * 0.587 + rgb[i, j, 2] * 0.114
            o[i, j] = <uint8_t>floor(y + 0.5)
    return out


def downsample2(object gray_in):
    cdef const uint8_t[:, ::1] g = np.ascontiguousarray(gray_in, dtype=np.uint8)
    cdef Py_ssize_t h = g.shape[0] // 2, w = g.shape[1] // 2, i, j
    out = np.empty((h, w), dtype=np.uint8)
    cdef uint8_t[:, ::1] o = out
    cdef unsigned int s
    for i in range(h):
        for j in range(w):
            s = (<unsigned int>g[2 * i, 2 * j] + g[2 * i, 2 * j + 1]
                 + g[2 * i + 1, 2 * j] + g[2 * i + 1, 2 * j + 1])
            o[i, j] = <uint8_t>floor(s * 0.25 + 0.5)
    return out


def gaussian_blur(object gray_in, object weights_in):
    cdef const uint8_t[:, ::1] g = np.ascontiguousarray(gray_in, dtype=np.uint8)
    cdef const double[::1] wt = np.ascontiguousarray(weights_in, dtype=np.float64)
    cdef Py_ssize_t h = g.shape[0], w = g.shape[1], k = wt.shape[0], r = k // 2
    cdef Py_ssize_t i, j, t, jj, ii
    horiz = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] hz = horiz
    cdef double acc
    for i in range(h):
        for j in range(w):
            acc = 0.0
            for t in range(k):
                jj = j + t - r
                if jj < 0:
                    jj = 0
                elif jj >= w:
                    jj = w - 1
                acc += wt[t] * g[i, jj]
            hz[i, j] = acc
    out = np.empty((h, w), dtype=np.uint8)
    cdef uint8_t[:, ::1] o = out
    for i in range(h):
        for j in range(w):
            acc = 0.0
            for t in range(k):
                ii = i + t - r
                if ii < 0:
                    ii = 0
                elif ii >= h:
                    ii = h - 1
                acc += wt[t] * hz[ii, j]
            o[i, j] = <uint8_t>floor(acc + 0.5)
    return out


cdef inline int _direction_bin(int gx, int gy) nogil:
    cdef double ax = fabs(<double>gx), ay = fabs(<double>gy)
    cdef double t1ax = T1 * ax, t2ax = T2 * ax
    cdef long p = <long>gx * gy
    if ay < t1ax:
        return 0
    if ay == t1ax:
        return 0 if p >= 0 else 3
    if ay < t2ax:
        return 1 if p > 0 else 3
    if ay == t2ax:
        return 1 if p > 0 else 2
    return 2


def canny(object gray_in, double low, double high):
    cdef const uint8_t[:, ::1] g = np.ascontiguousarray(gray_in, dtype=np.uint8)
    cdef Py_ssize_t h = g.shape[0], w = g.shape[1], i, j
    edges = np.zeros((h, w), dtype=bool)
    if h < 3 or w < 3:
        return edges
    gx_a = np.zeros((h, w), dtype=np.int32)
    gy_a = np.zeros((h, w), dtype=np.int32)
    mag_a = np.zeros((h, w), dtype=np.float64)
    cdef int32_t[:, ::1] gx = gx_a
    cdef int32_t[:, ::1] gy = gy_a
    cdef double[:, ::1] mag = mag_a
    cdef long vx, vy
    for i in range(1, h - 1):
        for j in range(1, w - 1):
            vx = ((g[i - 1, j + 1] + 2 * <long>g[i, j + 1] + g[i + 1, j + 1])
                  - (g[i - 1, j - 1] + 2 * <long>g[i, j - 1] + g[i + 1, j - 1]))
            vy = ((g[i + 1, j - 1] + 2 * <long>g[i + 1, j] + g[i + 1, j + 1])
                  - (g[i - 1, j - 1] + 2 * <long>g[i - 1, j] + g[i - 1, j + 1]))
            gx[i, j] = <int32_t>vx
            gy[i, j] = <int32_t>vy
            mag[i, j] = sqrt(<double>(vx * vx + vy * vy)) * 0.25

    # NMS with the same plateau tie rule as the pure backend
    cand_a = np.zeros((h, w), dtype=np.uint8)
    strong_a = np.zeros((h, w), dtype=np.uint8)
    cdef uint8_t[:, ::1] cand = cand_a
    cdef uint8_t[:, ::1] strong = strong_a
    cdef int d
    cdef double m, before, after
    cdef bint have_strong = False
    for i in range(1, h - 1):
        for j in range(1, w - 1):
            m = mag[i, j]
            if m < low:
                continue
            d = _direction_bin(gx[i, j], gy[i, j])
            if d == 0:
                before = mag[i, j - 1]; after = mag[i, j + 1]
            elif d == 1:
                before = mag[i - 1, j - 1]; after = mag[i + 1, j + 1]
            elif d == 2:
                before = mag[i - 1, j]; after = mag[i + 1, j]
            else:
                before = mag[i - 1, j + 1]; after = mag[i + 1, j - 1]
            if m > before and m >= after:
                cand[i, j] = 1
                if m >= high:
                    strong[i, j] = 1
                    have_strong = True
    if not have_strong:
        return edges

    # hysteresis: flood from strong pixels across 8-connected candidates
    cdef uint8_t[:, ::1] out = edges.view(np.uint8)
    stack_a = np.empty(h * w, dtype=np.int64)
    cdef int64_t[::1] stack = stack_a
    cdef Py_ssize_t top = 0, ci, cj, ni, nj
    cdef int di, dj
    for i in range(1, h - 1):
        for j in range(1, w - 1):
            if strong[i, j] and not out[i, j]:
                out[i, j] = 1
                stack[top] = i * w + j
                top += 1
                while top > 0:
                    top -= 1
                    ci = stack[top] // w
                    cj = stack[top] % w
                    for di in range(-1, 2):
                        for dj in range(-1, 2):
                            ni = ci + di
                            nj = cj + dj
                            if cand[ni, nj] and not out[ni, nj]:
                                out[ni, nj] = 1
                                stack[top] = ni * w + nj
                                top += 1
    return edges


def hough_accumulate(object ys_in, object xs_in, object cos_in, object sin_in,
                     double rho_res, int n_rho_half):
    cdef const int32_t[::1] ys = np.ascontiguousarray(ys_in, dtype=np.int32)
    cdef const int32_t[::1] xs = np.ascontiguousarray(xs_in, dtype=np.int32)
    cdef const double[::1] cos_t = np.ascontiguousarray(cos_in, dtype=np.float64)
    cdef const double[::1] sin_t = np.ascontiguousarray(sin_in, dtype=np.float64)
    cdef Py_ssize_t n = ys.shape[0], n_theta = cos_t.shape[0], p, t
    acc_a = np.zeros((2 * n_rho_half + 1, n_theta), dtype=np.int32)
    cdef int32_t[:, ::1] acc = acc_a
    cdef double inv = 1.0 / rho_res, x, y
    cdef Py_ssize_t b
    for p in range(n):
        x = <double>xs[p]
        y = <double>ys[p]
        for t in range(n_theta):
            b = <Py_ssize_t>floor((x * cos_t[t] + y * sin_t[t]) * inv + 0.5) + n_rho_half
            acc[b, t] += 1
    return acc_a
