"""DTLZ1-4 evaluation kernels (M-generic, minimization, box [0,1]^D).

The first M-1 variables set the position on the front; the remaining k
variables feed the distance function g.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _g_rastrigin(x, start):
    # DTLZ1/DTLZ3 distance function
    k = x.shape[0] - start
    s = 0.0
    for i in range(start, x.shape[0]):
        c = x[i] - 0.5
        s += c * c - np.cos(20.0 * np.pi * c)
    return 100.0 * (k + s)


@njit(cache=True)
def _g_sphere(x, start):
    # DTLZ2/DTLZ4 distance function
    s = 0.0
    for i in range(start, x.shape[0]):
        c = x[i] - 0.5
        s += c * c
    return s


@njit(cache=True)
def dtlz1(x, out):
    m = out.shape[0]
    g = _g_rastrigin(x, m - 1)
    base = 0.5 * (1.0 + g)
    for j in range(m):
        v = base
        for i in range(m - 1 - j):
            v *= x[i]
        if j > 0:
            v *= 1.0 - x[m - 1 - j]
        out[j] = v


@njit(cache=True)
def _dtlz2_shape(x, g, alpha, out):
    m = out.shape[0]
    for j in range(m):
        v = 1.0 + g
        for i in range(m - 1 - j):
            v *= np.cos(0.5 * np.pi * x[i] ** alpha)
        if j > 0:
            v *= np.sin(0.5 * np.pi * x[m - 1 - j] ** alpha)
        out[j] = v


@njit(cache=True)
def dtlz2(x, out):
    _dtlz2_shape(x, _g_sphere(x, out.shape[0] - 1), 1.0, out)


@njit(cache=True)
def dtlz3(x, out):
    _dtlz2_shape(x, _g_rastrigin(x, out.shape[0] - 1), 1.0, out)


@njit(cache=True)
def dtlz4(x, out):
    # position variables are raised to alpha=100, biasing the density
    _dtlz2_shape(x, _g_sphere(x, out.shape[0] - 1), 100.0, out)
