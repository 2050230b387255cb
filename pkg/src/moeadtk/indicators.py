"""Exact hypervolume, IGD, and the normalization frame used for evaluation.

Hypervolume is the Lebesgue measure of the region dominated by a point set and
bounded above by the reference point (r, ..., r), under minimization.  Points
with any coordinate at or beyond r are clipped out, and dominated points never
change the result.  The three-objective path is an O(n log n) dimension sweep
over a 2-D staircase; other dimensions fall back to a recursive slicing method
that is exact but slower.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import ContractViolation


@dataclass(frozen=True)
class HvReferenceFrame:
    """Ideal/nadir pair defining the normalization for indicator computation.

    The hypervolume reference point is (r_scalar, ..., r_scalar) in the
    normalized space where ideal maps to 0 and nadir maps to 1.
    """

    ideal: np.ndarray
    nadir: np.ndarray
    r_scalar: float = 1.1

    def __post_init__(self):
        ideal = np.asarray(self.ideal, dtype=np.float64)
        nadir = np.asarray(self.nadir, dtype=np.float64)
        object.__setattr__(self, "ideal", ideal)
        object.__setattr__(self, "nadir", nadir)
        if ideal.shape != nadir.shape or ideal.ndim != 1:
            raise ContractViolation("ideal and nadir must be vectors of equal length")
        if not (np.isfinite(ideal).all() and np.isfinite(nadir).all()):
            raise ContractViolation("frame extremes must be finite")

    @property
    def m(self) -> int:
        return self.ideal.shape[0]


def normalize_for_indicator(points, frame: HvReferenceFrame) -> np.ndarray:
    """Affine map sending the frame's ideal to 0 and nadir to 1, componentwise."""
    pts = np.asarray(points, dtype=np.float64)
    span = frame.nadir - frame.ideal
    if (span <= 0).any():
        raise ContractViolation("degenerate frame: nadir must exceed ideal componentwise")
    return (pts - frame.ideal) / span


@njit(cache=True)
def _hv3d(pts, r):
    """Dimension sweep in ascending f3; maintains the 2-D staircase area."""
    n = pts.shape[0]
    keep = np.empty(n, np.int64)
    nkeep = 0
    for i in range(n):
        if pts[i, 0] < r and pts[i, 1] < r and pts[i, 2] < r:
            keep[nkeep] = i
            nkeep += 1
    if nkeep == 0:
        return 0.0
    zs = np.empty(nkeep, np.float64)
    for i in range(nkeep):
        zs[i] = pts[keep[i], 2]
    order = np.argsort(zs, kind="mergesort")

    sx = np.empty(nkeep, np.float64)  # staircase: x ascending, y strictly descending
    sy = np.empty(nkeep, np.float64)
    ns = 0
    area = 0.0
    vol = 0.0
    zprev = 0.0
    started = False
    for oi in range(nkeep):
        row = keep[order[oi]]
        x = pts[row, 0]
        y = pts[row, 1]
        z = pts[row, 2]
        if started:
            vol += area * (z - zprev)
        zprev = z
        started = True
        # insertion point: first staircase index with sx > x
        lo = 0
        hi = ns
        while lo < hi:
            mid = (lo + hi) >> 1
            if sx[mid] <= x:
                lo = mid + 1
            else:
                hi = mid
        i0 = lo
        if i0 > 0 and sy[i0 - 1] <= y:
            continue  # dominated in the 2-D projection
        cap = r if i0 == 0 else sy[i0 - 1]
        # accumulate the newly covered area while walking over now-dominated steps
        j = i0
        px = x
        h = cap
        gain = 0.0
        while j < ns and sy[j] >= y:
            gain += (sx[j] - px) * (h - y)
            px = sx[j]
            h = sy[j]
            j += 1
        endx = r if j == ns else sx[j]
        gain += (endx - px) * (h - y)
        area += gain
        # splice out indices [i0, j) and insert (x, y)
        nrem = j - i0
        if nrem == 0:
            for q in range(ns, i0, -1):
                sx[q] = sx[q - 1]
                sy[q] = sy[q - 1]
            ns += 1
        elif nrem > 1:
            shift = nrem - 1
            for q in range(j, ns):
                sx[q - shift] = sx[q]
                sy[q - shift] = sy[q]
            ns -= shift
        sx[i0] = x
        sy[i0] = y
    vol += area * (r - zprev)
    return vol


def _hv2d(pts: np.ndarray, r: float) -> float:
    inside = pts[(pts < r).all(axis=1)]
    if inside.shape[0] == 0:
        return 0.0
    order = np.lexsort((inside[:, 1], inside[:, 0]))
    inside = inside[order]
    vol = 0.0
    best_y = r
    for x, y in inside:
        if y < best_y:
            vol += (r - x) * (best_y - y)
            best_y = y
    return vol


def _hv_recursive(pts: np.ndarray, r: float) -> float:
    """Exact generic-M hypervolume by slicing on the last objective."""
    m = pts.shape[1]
    if m == 1:
        return float(max(0.0, r - pts.min()))
    if m == 2:
        return _hv2d(pts, r)
    if m == 3:
        return float(_hv3d(np.ascontiguousarray(pts), r))
    inside = pts[(pts < r).all(axis=1)]
    if inside.shape[0] == 0:
        return 0.0
    order = np.argsort(inside[:, -1], kind="stable")
    inside = inside[order]
    zs = inside[:, -1]
    vol = 0.0
    for i in range(inside.shape[0]):
        upper = r if i + 1 == inside.shape[0] else zs[i + 1]
        depth = upper - zs[i]
        if depth > 0.0:
            vol += depth * _hv_recursive(inside[: i + 1, :-1], r)
    return vol


def hypervolume(points, r: float = 1.1) -> float:
    """Exact hypervolume of ``points`` w.r.t. reference (r, ..., r)."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise ContractViolation("expected an (n, M) matrix of points")
    if pts.shape[0] == 0:
        return 0.0
    if pts.shape[1] == 3:
        return float(_hv3d(np.ascontiguousarray(pts), r))
    return _hv_recursive(pts, r)


def hypervolume_in_frame(points, frame: HvReferenceFrame) -> float:
    return hypervolume(normalize_for_indicator(points, frame), frame.r_scalar)


def hypervolume_ratio(points, frame: HvReferenceFrame) -> float:
    """Hypervolume in the frame, normalized by the reference box volume
    r_scalar**M, so 1 means the whole box is dominated.  Reported comparison
    values use this scale."""
    return hypervolume_in_frame(points, frame) / frame.r_scalar ** frame.m


def igd(points, reference) -> float:
    """Mean Euclidean distance from each reference point to its nearest
    solution point.  Both sets are expected in the same (normalized) frame."""
    pts = np.asarray(points, dtype=np.float64)
    ref = np.asarray(getattr(reference, "points", reference), dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ContractViolation("solution set must be a non-empty (n, M) matrix")
    if ref.ndim != 2 or ref.shape[0] == 0:
        raise ContractViolation("reference set must be a non-empty (n, M) matrix")
    if pts.shape[1] != ref.shape[1]:
        raise ContractViolation("solution and reference sets differ in objective count")
    total = 0.0
    chunk = max(1, int(4e6) // max(1, pts.shape[0]))
    for start in range(0, ref.shape[0], chunk):
        block = ref[start : start + chunk]
        d2 = ((block[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        total += np.sqrt(d2.min(axis=1)).sum()
    return float(total / ref.shape[0])
