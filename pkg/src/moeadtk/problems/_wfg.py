"""WFG1-9 evaluation kernels (M-generic, minimization).

Variable i has domain [0, 2i].  The first k variables are position-related
(k must be a multiple of M-1), the remaining l are distance-related (WFG2/3
need l even).  Each problem is a pipeline of transition maps over y = z/(2i)
followed by shape functions; objective m is x_M + 2m * h_m.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _clamp01(v):
    if v < 0.0:
        return 0.0
    if v > 1.0:
        return 1.0
    return v


@njit(cache=True, inline="always")
def _s_linear(y, a):
    return _clamp01(abs(y - a) / abs(np.floor(a - y) + a))


@njit(cache=True, inline="always")
def _s_deceptive(y, a, b, c):
    t1 = np.floor(y - a + b) * (1.0 - c + (a - b) / b) / (a - b)
    t2 = np.floor(a + b - y) * (1.0 - c + (1.0 - a - b) / b) / (1.0 - a - b)
    return _clamp01(1.0 + (abs(y - a) - b) * (t1 + t2 + 1.0 / b))


@njit(cache=True, inline="always")
def _s_multimodal(y, a, b, c):
    t1 = abs(y - c) / (2.0 * (np.floor(c - y) + c))
    t2 = (4.0 * a + 2.0) * np.pi * (0.5 - t1)
    return _clamp01((1.0 + np.cos(t2) + 4.0 * b * t1 * t1) / (b + 2.0))


@njit(cache=True, inline="always")
def _b_flat(y, a, b, c):
    v = a + min(0.0, np.floor(y - b)) * (a * (b - y) / b) \
        - min(0.0, np.floor(c - y)) * ((1.0 - a) * (y - c) / (1.0 - c))
    return _clamp01(v)


@njit(cache=True, inline="always")
def _b_poly(y, alpha):
    return _clamp01(y ** alpha)


@njit(cache=True, inline="always")
def _b_param(y, u, a, b, c):
    v = a - (1.0 - 2.0 * u) * abs(np.floor(0.5 - u) + a)
    return _clamp01(y ** (b + (c - b) * v))


@njit(cache=True)
def _r_sum(y, w, lo, hi):
    num = 0.0
    den = 0.0
    for i in range(lo, hi):
        num += w[i] * y[i]
        den += w[i]
    return _clamp01(num / den)


@njit(cache=True)
def _r_sum_uniform(y, lo, hi):
    s = 0.0
    for i in range(lo, hi):
        s += y[i]
    return _clamp01(s / (hi - lo))


@njit(cache=True)
def _r_nonsep(y, lo, hi, a):
    m = hi - lo
    num = 0.0
    for j in range(m):
        num += y[lo + j]
        for kk in range(a - 1):
            num += abs(y[lo + j] - y[lo + (1 + j + kk) % m])
    half = np.ceil(a / 2.0)
    den = m * half * (1.0 + 2.0 * a - 2.0 * half) / a
    return _clamp01(num / den)


@njit(cache=True)
def _post_and_shapes(t, m, shape_id, degenerate, out):
    """Apply the position adjustment and write f_m = x_M + 2m * h_m.

    shape_id: 0 concave, 1 convex+mixed (WFG1), 2 convex+disconnected (WFG2),
    3 linear.  ``degenerate`` zeroes the adjustment constants A_2..A_{M-1}
    (WFG3 only).
    """
    x = np.empty(m, np.float64)
    xm = t[m - 1]
    for i in range(m - 1):
        a_i = 0.0 if (degenerate and i > 0) else 1.0
        x[i] = max(xm, a_i) * (t[i] - 0.5) + 0.5
    x[m - 1] = xm

    for j in range(m):
        obj = j + 1  # 1-based objective number
        if shape_id == 0:  # concave
            h = 1.0
            for i in range(m - obj):
                h *= np.sin(0.5 * np.pi * x[i])
            if obj > 1:
                h *= np.cos(0.5 * np.pi * x[m - obj])
        elif shape_id == 3:  # linear
            h = 1.0
            for i in range(m - obj):
                h *= x[i]
            if obj > 1:
                h *= 1.0 - x[m - obj]
        else:  # convex for objectives 1..M-1
            if obj < m:
                h = 1.0
                for i in range(m - obj):
                    h *= 1.0 - np.cos(0.5 * np.pi * x[i])
                if obj > 1:
                    h *= 1.0 - np.sin(0.5 * np.pi * x[m - obj])
            elif shape_id == 1:  # mixed, alpha=1, A=5
                aux = 10.0 * np.pi
                h = 1.0 - x[0] - np.cos(aux * x[0] + 0.5 * np.pi) / aux
            else:  # disconnected, alpha=beta=1, A=5
                c = np.cos(5.0 * np.pi * x[0])
                h = 1.0 - x[0] * c * c
            h = _clamp01(h)
        out[j] = x[m - 1] + 2.0 * obj * h


@njit(cache=True)
def wfg_eval(pid, x, k, out):
    """Evaluate WFG problem ``pid`` in 1..9 at decision vector x."""
    n = x.shape[0]
    m = out.shape[0]
    gap = k // (m - 1)
    y = np.empty(n, np.float64)
    for i in range(n):
        y[i] = x[i] / (2.0 * (i + 1))

    if pid == 1:
        for i in range(k, n):
            y[i] = _s_linear(y[i], 0.35)
        for i in range(k, n):
            y[i] = _b_flat(y[i], 0.8, 0.75, 0.85)
        for i in range(n):
            y[i] = _b_poly(y[i], 0.02)
        w = np.empty(n, np.float64)
        for i in range(n):
            w[i] = 2.0 * (i + 1)
        t = np.empty(m, np.float64)
        for j in range(m - 1):
            t[j] = _r_sum(y, w, j * gap, (j + 1) * gap)
        t[m - 1] = _r_sum(y, w, k, n)
        _post_and_shapes(t, m, 1, False, out)
        return

    if pid == 2 or pid == 3:
        for i in range(k, n):
            y[i] = _s_linear(y[i], 0.35)
        l = n - k
        n2 = k + l // 2
        y2 = np.empty(n2, np.float64)
        for i in range(k):
            y2[i] = y[i]
        for ii in range(l // 2):
            y2[k + ii] = _r_nonsep(y, k + 2 * ii, k + 2 * ii + 2, 2)
        t = np.empty(m, np.float64)
        for j in range(m - 1):
            t[j] = _r_sum_uniform(y2, j * gap, (j + 1) * gap)
        t[m - 1] = _r_sum_uniform(y2, k, n2)
        if pid == 2:
            _post_and_shapes(t, m, 2, False, out)
        else:
            _post_and_shapes(t, m, 3, True, out)
        return

    if pid == 4:
        for i in range(n):
            y[i] = _s_multimodal(y[i], 30.0, 10.0, 0.35)
    elif pid == 5:
        for i in range(n):
            y[i] = _s_deceptive(y[i], 0.35, 0.001, 0.05)
    elif pid == 6:
        for i in range(k, n):
            y[i] = _s_linear(y[i], 0.35)
    elif pid == 7:
        yy = y.copy()
        for i in range(k):
            u = _r_sum_uniform(yy, i + 1, n)
            y[i] = _b_param(yy[i], u, 0.98 / 49.98, 0.02, 50.0)
        for i in range(k, n):
            y[i] = _s_linear(y[i], 0.35)
    elif pid == 8:
        yy = y.copy()
        for i in range(k, n):
            u = _r_sum_uniform(yy, 0, i)
            y[i] = _b_param(yy[i], u, 0.98 / 49.98, 0.02, 50.0)
        for i in range(k, n):
            y[i] = _s_linear(y[i], 0.35)
    else:  # pid == 9
        yy = y.copy()
        for i in range(n - 1):
            u = _r_sum_uniform(yy, i + 1, n)
            y[i] = _b_param(yy[i], u, 0.98 / 49.98, 0.02, 50.0)
        for i in range(k):
            y[i] = _s_deceptive(y[i], 0.35, 0.001, 0.05)
        for i in range(k, n):
            y[i] = _s_multimodal(y[i], 30.0, 95.0, 0.35)

    t = np.empty(m, np.float64)
    if pid == 6 or pid == 9:
        for j in range(m - 1):
            t[j] = _r_nonsep(y, j * gap, (j + 1) * gap, gap)
        t[m - 1] = _r_nonsep(y, k, n, n - k)
    else:
        for j in range(m - 1):
            t[j] = _r_sum_uniform(y, j * gap, (j + 1) * gap)
        t[m - 1] = _r_sum_uniform(y, k, n)
    _post_and_shapes(t, m, 0, False, out)
