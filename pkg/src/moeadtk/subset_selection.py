"""Solution subset selection from the non-dominated portion of an archive.

Three selectors: a fast distance-based spread heuristic (used inside the
configuration tuner), greedy hypervolume inclusion (lazy, with the plain eager
method kept as its reference), and greedy IGD inclusion.  Distance-based
selection measures distances in raw objective space; the greedy indicator
selectors operate in a normalization frame because their indicators require
one.  All ties break toward the lower candidate index, which makes every
selector deterministic given its inputs.
"""
from __future__ import annotations

import heapq

import numpy as np

from .core import ContractViolation
from .indicators import HvReferenceFrame, hypervolume, normalize_for_indicator


def _as_matrix(candidates) -> np.ndarray:
    pts = np.asarray(candidates, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ContractViolation("candidates must form a non-empty (n, M) matrix")
    return pts


def distance_based_select(candidates, k: int, rng: np.random.Generator,
                          *, frame: HvReferenceFrame | None = None) -> list[int]:
    """Greedy max-min-distance spread over the candidates.

    The first pick is one of the M objective-wise minimizers, chosen uniformly
    at random; every later pick maximizes the minimum Euclidean distance to
    the already selected set.  Distances are measured in raw objective space
    unless a frame is supplied.  Runs in O(k n).
    """
    if k < 1:
        raise ContractViolation("k must be >= 1")
    pts = _as_matrix(candidates)
    if frame is not None:
        pts = normalize_for_indicator(pts, frame)
    n, m = pts.shape
    extremes = [int(np.argmin(pts[:, j])) for j in range(m)]
    first = extremes[int(rng.integers(0, m))]
    selected = [first]
    dmin = np.linalg.norm(pts - pts[first], axis=1)
    dmin[first] = -np.inf
    while len(selected) < min(k, n):
        pick = int(np.argmax(dmin))
        selected.append(pick)
        dmin = np.minimum(dmin, np.linalg.norm(pts - pts[pick], axis=1))
        dmin[pick] = -np.inf
    return selected


def _prepare_hv(candidates, frame: HvReferenceFrame):
    pts = normalize_for_indicator(_as_matrix(candidates), frame)
    return np.ascontiguousarray(pts), frame.r_scalar


def greedy_hv_select_eager(candidates, k: int, frame: HvReferenceFrame) -> list[int]:
    """Plain greedy hypervolume inclusion: every step rescores every remaining
    candidate.  Reference method for the lazy variant."""
    if k < 1:
        raise ContractViolation("k must be >= 1")
    pts, r = _prepare_hv(candidates, frame)
    n = pts.shape[0]
    selected: list[int] = []
    chosen = np.zeros(n, dtype=bool)
    stack = np.empty((min(k, n) + 1, pts.shape[1]))
    hv_cur = 0.0
    while len(selected) < min(k, n):
        depth = len(selected)
        best_gain = -np.inf
        best_idx = -1
        for c in range(n):
            if chosen[c]:
                continue
            stack[depth] = pts[c]
            gain = hypervolume(stack[: depth + 1], r) - hv_cur
            if gain > best_gain:
                best_gain = gain
                best_idx = c
        stack[depth] = pts[best_idx]
        hv_cur = hypervolume(stack[: depth + 1], r)
        chosen[best_idx] = True
        selected.append(best_idx)
    return selected


def greedy_hv_select(candidates, k: int, frame: HvReferenceFrame) -> list[int]:
    """Lazy greedy hypervolume inclusion.

    Cached marginal contributions are upper bounds once the selected set grows
    (hypervolume is submodular), so only the top of the priority queue needs
    rescoring before a point is accepted.  The result is index-for-index
    identical to the eager method, including its lower-index tie-breaking.
    """
    if k < 1:
        raise ContractViolation("k must be >= 1")
    pts, r = _prepare_hv(candidates, frame)
    n = pts.shape[0]
    target = min(k, n)
    stack = np.empty((target + 1, pts.shape[1]))
    single = np.empty((1, pts.shape[1]))

    heap = []
    for c in range(n):
        single[0] = pts[c]
        heapq.heappush(heap, (-hypervolume(single, r), c))
    fresh_at = np.full(n, 0, dtype=np.int64)  # step at which the cached gain was computed

    selected: list[int] = []
    hv_cur = 0.0
    step = 0
    while len(selected) < target:
        depth = len(selected)
        while True:
            neg_gain, c = heapq.heappop(heap)
            if fresh_at[c] == step:
                break
            stack[depth] = pts[c]
            gain = hypervolume(stack[: depth + 1], r) - hv_cur
            fresh_at[c] = step
            heapq.heappush(heap, (-gain, c))
        stack[depth] = pts[c]
        hv_cur = hypervolume(stack[: depth + 1], r)
        selected.append(c)
        step += 1
    return selected


def greedy_igd_select(candidates, k: int, reference, frame: HvReferenceFrame) -> list[int]:
    """Greedy IGD inclusion: each step adds the candidate that minimizes the
    IGD of the selected set, maintaining per-reference nearest distances
    incrementally (O(|reference|) per candidate per step)."""
    if k < 1:
        raise ContractViolation("k must be >= 1")
    pts = normalize_for_indicator(_as_matrix(candidates), frame)
    ref = np.asarray(getattr(reference, "points", reference), dtype=np.float64)
    if ref.ndim != 2 or ref.shape[0] == 0:
        raise ContractViolation("reference set must be non-empty")
    ref = normalize_for_indicator(ref, frame)
    n = pts.shape[0]
    nref = ref.shape[0]

    cache_limit = 5_000_000  # distance-matrix entries held at once
    cached = n * nref <= cache_limit
    if cached:
        dist = np.sqrt(((pts[:, None, :] - ref[None, :, :]) ** 2).sum(axis=2))

    def candidate_scores(dmin):
        if cached:
            return np.minimum(dist, dmin[None, :]).mean(axis=1)
        scores = np.empty(n)
        chunk = max(1, cache_limit // nref)
        for start in range(0, n, chunk):
            block = pts[start : start + chunk]
            d = np.sqrt(((block[:, None, :] - ref[None, :, :]) ** 2).sum(axis=2))
            scores[start : start + chunk] = np.minimum(d, dmin[None, :]).mean(axis=1)
        return scores

    selected: list[int] = []
    taken = np.zeros(n, dtype=bool)
    dmin = np.full(nref, np.inf)
    while len(selected) < min(k, n):
        scores = candidate_scores(dmin)
        scores[taken] = np.inf
        pick = int(np.argmin(scores))
        selected.append(pick)
        taken[pick] = True
        if cached:
            np.minimum(dmin, dist[pick], out=dmin)
        else:
            np.minimum(dmin, np.sqrt(((ref - pts[pick]) ** 2).sum(axis=1)), out=dmin)
    return selected
