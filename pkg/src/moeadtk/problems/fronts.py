"""Analytic Pareto-front samplers.

Base fronts:
  dtlz1          simplex sum(f) = 0.5
  dtlz2/3/4      unit sphere (positive orthant)
  wfg1, wfg2     image of the convex+mixed / convex+disconnected shape surface,
                 reduced to its non-dominated subset
  wfg4..wfg9     sphere scaled by (2, 4, ..., 2M)
  wfg3           no closed form (flag region); handled upstream as an error

Minus fronts are the negated maximal boundary of the base problem's attainable
objective set.  For DTLZ that is the front shape scaled by the distance
function's maximum; for WFG it is -(1 + S * h) over the same shape surfaces
(the distance transforms reach 1, and position parameters stay free).
"""
from __future__ import annotations

import numpy as np

from ..core import ContractViolation, nondominated_filter
from ..decomposition import das_dennis
from . import ProblemSpec

# max of (x-0.5)^2 - cos(20*pi*(x-0.5)) over [0,1], attained at x-0.5 = +/-0.45;
# the Rastrigin-style distance function thus peaks at 100 * k * (1 + 2.2025) per
# its own constant: g_max = 100 * (k + 1.2025 * k)
_RASTRIGIN_TERM_MAX = 1.2025


def _subsample(points: np.ndarray, count: int) -> np.ndarray:
    if points.shape[0] <= count:
        return points
    idx = np.linspace(0, points.shape[0] - 1, count).astype(int)
    return points[idx]


def _simplex_points(m: int, count: int) -> np.ndarray:
    h = 1
    while True:
        lattice = das_dennis(m, h)
        if lattice.n >= count:
            return _subsample(lattice.vectors, count)
        h += 1


def _sphere_points(m: int, count: int) -> np.ndarray:
    pts = _simplex_points(m, count)
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def _shape_grid(m: int, count: int) -> np.ndarray:
    # parameter box [0,1]^(M-1); oversample to survive non-dominance filtering
    per_axis = int(np.ceil((2.0 * max(count, 4)) ** (1.0 / (m - 1))))
    axes = [np.linspace(0.0, 1.0, per_axis) for _ in range(m - 1)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1)


def _convex_columns(x: np.ndarray, m: int) -> list[np.ndarray]:
    cols = []
    for obj in range(1, m):
        h = np.ones(x.shape[0])
        for i in range(m - obj):
            h = h * (1.0 - np.cos(0.5 * np.pi * x[:, i]))
        if obj > 1:
            h = h * (1.0 - np.sin(0.5 * np.pi * x[:, m - obj]))
        cols.append(h)
    return cols


def _shape_surface(family: str, m: int, count: int) -> np.ndarray:
    """h-vectors of the WFG shape surface, (n, M)."""
    if family in ("wfg4", "wfg5", "wfg6", "wfg7", "wfg8", "wfg9"):
        return _sphere_points(m, count)
    if family == "wfg3":
        return _simplex_points(m, count)
    x = _shape_grid(m, count)
    cols = _convex_columns(x, m)
    if family == "wfg1":
        aux = 10.0 * np.pi
        last = 1.0 - x[:, 0] - np.cos(aux * x[:, 0] + 0.5 * np.pi) / aux
    else:  # wfg2
        last = 1.0 - x[:, 0] * np.cos(5.0 * np.pi * x[:, 0]) ** 2
    cols.append(np.clip(last, 0.0, 1.0))
    return np.stack(cols, axis=1)


def _filter_min(points: np.ndarray) -> np.ndarray:
    keep = nondominated_filter(points)
    return points[keep]


def sample(spec: ProblemSpec, count: int) -> np.ndarray:
    m = spec.m
    family = spec.family
    scale = 2.0 * np.arange(1, m + 1)

    if not spec.is_wfg:
        k = spec.position_count
        if family == "dtlz1":
            base = 0.5 * _simplex_points(m, count)
            g_max = 100.0 * k * (1.0 + _RASTRIGIN_TERM_MAX)
        else:
            base = _sphere_points(m, count)
            if family == "dtlz3":
                g_max = 100.0 * k * (1.0 + _RASTRIGIN_TERM_MAX)
            else:
                g_max = 0.25 * k
        if not spec.minus:
            return base
        return _subsample(-(1.0 + g_max) * base, count)

    if family == "wfg3" and not spec.minus:
        raise ContractViolation("wfg3 front must come from a reference file")

    h = _shape_surface(family, m, count)
    if spec.minus:
        pts = -(1.0 + scale * h)
    else:
        pts = scale * h
    if family in ("wfg1", "wfg2"):
        pts = _filter_min(pts)
    return _subsample(pts, count)
