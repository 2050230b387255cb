import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def brute_force_nondominated(points) -> list[int]:
    """O(n^2) reference for the non-dominated filter."""
    pts = np.asarray(points, dtype=float)
    keep = []
    for i in range(len(pts)):
        dominated = False
        for j in range(len(pts)):
            if i == j:
                continue
            if (pts[j] <= pts[i]).all() and (pts[j] < pts[i]).any():
                dominated = True
                break
        if not dominated:
            keep.append(i)
    return keep


def hv_inclusion_exclusion(points, r: float) -> float:
    """Exact hypervolume by inclusion-exclusion over all point subsets."""
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    total = 0.0
    for mask in range(1, 1 << n):
        mx = np.full(pts.shape[1], -np.inf)
        bits = 0
        for i in range(n):
            if mask >> i & 1:
                bits += 1
                mx = np.maximum(mx, pts[i])
        widths = r - mx
        if (widths > 0).all():
            total += np.prod(widths) * (1.0 if bits % 2 else -1.0)
    return total
