"""Weight lattices, scalarizing functions, dynamic reference point, normalization.

Five scalarizers are supported: weighted sum (WS), Tchebycheff (TCH), modified
Tchebycheff (MTCH), penalty-based boundary intersection (PBI) and inverted PBI
(IPBI).  WS/TCH/MTCH/PBI are minimized; IPBI is maximized, so callers must use
a sign-aware comparison rather than negating objectives.

The reference point z* anchors TCH/MTCH/PBI.  It is the componentwise minimum
over all examined solutions shifted down by a scheduled offset eps that decays
linearly from ``eps_ini`` (first generation) to ``eps_end`` (last generation).
IPBI instead anchors on the nadir estimate, the componentwise maximum of the
current population.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from numba import njit

from .core import ContractViolation, _as_floats

SCALARIZER_KINDS = ("WS", "TCH", "MTCH", "PBI", "IPBI")

# integer codes used by the jitted kernels and the search engine
SCAL_WS, SCAL_TCH, SCAL_MTCH, SCAL_PBI, SCAL_IPBI = range(5)
SCAL_CODE = dict(zip(SCALARIZER_KINDS, range(5)))

MTCH_ZERO_WEIGHT = 1e-6  # substituted for w_i = 0 in MTCH only


@dataclass(frozen=True)
class ScalarizerChoice:
    """Scalarizer kind plus the penalty parameter used only by PBI/IPBI."""

    kind: str
    theta: float | None = None

    def __post_init__(self):
        if self.kind not in SCALARIZER_KINDS:
            raise ContractViolation(f"unknown scalarizer {self.kind!r}")
        needs_theta = self.kind in ("PBI", "IPBI")
        if needs_theta and self.theta is None:
            raise ContractViolation(f"{self.kind} requires theta")
        if not needs_theta and self.theta is not None:
            raise ContractViolation(f"{self.kind} does not take theta")
        if self.theta is not None and not 0.0 <= self.theta <= 10.0:
            raise ContractViolation("theta must lie in [0, 10]")

    @property
    def maximizing(self) -> bool:
        return self.kind == "IPBI"


@dataclass(frozen=True)
class WeightLattice:
    """The N weight vectors defining the subproblems (simplex lattice)."""

    vectors: np.ndarray  # (N, M)
    h: int

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def m(self) -> int:
        return self.vectors.shape[1]


def das_dennis(m: int, h: int) -> WeightLattice:
    """Simplex-lattice weight vectors: all compositions of ``h`` into ``m``
    non-negative parts, divided by ``h``, in lexicographic order."""
    if m < 2 or h < 1:
        raise ContractViolation("need m >= 2 and h >= 1")
    count = comb(h + m - 1, m - 1)
    if count > 5_000_000:
        raise ContractViolation(f"lattice of {count} vectors is too large")
    out = np.empty((count, m), dtype=np.float64)
    row = 0
    parts = [0] * m

    def rec(pos: int, remaining: int):
        nonlocal row
        if pos == m - 1:
            parts[pos] = remaining
            for j in range(m):
                out[row, j] = parts[j] / h
            row += 1
            return
        for v in range(remaining + 1):
            parts[pos] = v
            rec(pos + 1, remaining - v)

    rec(0, h)
    return WeightLattice(out, h)


def lattice_for_population(m: int, n: int) -> WeightLattice:
    """The simplex lattice whose size is exactly ``n``, or an error if no
    division count produces it."""
    for h in range(1, 4000):
        size = comb(h + m - 1, m - 1)
        if size == n:
            return das_dennis(m, h)
        if size > n:
            break
    raise ContractViolation(f"no simplex lattice of size {n} exists for m={m}")


@dataclass
class ReferencePointState:
    """Inputs of the scheduled reference point: archive-wide minima plus the
    linear eps schedule over generations 1..t_max."""

    z_min: np.ndarray
    eps_ini: float
    eps_end: float
    t_max: int
    t: int = 1


def epsilon_schedule(state: ReferencePointState) -> float:
    """Linearly decreasing offset: eps_ini at t=1, eps_end at t=t_max."""
    if state.t_max < 1:
        raise ContractViolation("t_max must be >= 1")
    if not 1 <= state.t <= state.t_max:
        raise ContractViolation(f"generation index {state.t} outside [1, {state.t_max}]")
    if state.t_max == 1:
        return float(state.eps_end)
    frac = (state.t_max - state.t) / (state.t_max - 1)
    return float((state.eps_ini - state.eps_end) * frac + state.eps_end)


def reference_point(state: ReferencePointState) -> np.ndarray:
    """z* = z_min - eps(t).  A negative scheduled eps places z* above z_min."""
    eps = epsilon_schedule(state)
    return np.asarray(state.z_min, dtype=np.float64) - eps


def nadir_estimate(population_objectives) -> np.ndarray:
    """Componentwise maximum over the current population's objectives."""
    objs = np.asarray(population_objectives, dtype=np.float64)
    if objs.ndim != 2 or objs.shape[0] == 0:
        raise ContractViolation("need a non-empty (n, M) objective matrix")
    return objs.max(axis=0)


@njit(cache=True)
def _ws_kernel(f, w):
    s = 0.0
    for i in range(f.shape[0]):
        s += w[i] * f[i]
    return s


@njit(cache=True)
def _tch_kernel(f, w, z):
    best = -np.inf
    for i in range(f.shape[0]):
        v = w[i] * abs(z[i] - f[i])
        if v > best:
            best = v
    return best


@njit(cache=True)
def _mtch_kernel(f, w, z):
    best = -np.inf
    for i in range(f.shape[0]):
        wi = w[i] if w[i] > 0.0 else MTCH_ZERO_WEIGHT
        v = abs(z[i] - f[i]) / wi
        if v > best:
            best = v
    return best


@njit(cache=True)
def _pbi_kernel(f, w, z, theta, wnorm):
    proj = 0.0
    for i in range(f.shape[0]):
        proj += (f[i] - z[i]) * w[i]
    d1 = abs(proj) / wnorm
    d2sq = 0.0
    for i in range(f.shape[0]):
        r = f[i] - z[i] - d1 * (w[i] / wnorm)
        d2sq += r * r
    return d1 + theta * np.sqrt(d2sq)


@njit(cache=True)
def _ipbi_kernel(f, w, znad, theta, wnorm):
    proj = 0.0
    for i in range(f.shape[0]):
        proj += (znad[i] - f[i]) * w[i]
    d1 = abs(proj) / wnorm
    d2sq = 0.0
    for i in range(f.shape[0]):
        r = znad[i] - f[i] - d1 * (w[i] / wnorm)
        d2sq += r * r
    return d1 - theta * np.sqrt(d2sq)


def _pair(f, w):
    f = _as_floats(f)
    w = _as_floats(w)
    if f.shape != w.shape:
        raise ContractViolation("objective and weight vectors must have equal length")
    return f, w


def scalarize_ws(f, w) -> float:
    """Weighted sum, minimized."""
    f, w = _pair(f, w)
    return float(_ws_kernel(f, w))


def scalarize_tch(f, w, z_star) -> float:
    """Tchebycheff max_i w_i |z*_i - f_i|, minimized.  A zero weight keeps its
    literal value (its axis simply contributes nothing)."""
    f, w = _pair(f, w)
    return float(_tch_kernel(f, w, _as_floats(z_star)))


def scalarize_mtch(f, w, z_star) -> float:
    """Modified Tchebycheff max_i |z*_i - f_i| / w_i, minimized; zero weights
    are replaced by 1e-6 to avoid division by zero."""
    f, w = _pair(f, w)
    return float(_mtch_kernel(f, w, _as_floats(z_star)))


def scalarize_pbi(f, w, z_star, theta: float) -> float:
    """Penalty-based boundary intersection d1 + theta * d2, minimized."""
    f, w = _pair(f, w)
    wnorm = float(np.linalg.norm(w))
    if wnorm == 0.0:
        raise ContractViolation("PBI requires a non-zero weight vector")
    return float(_pbi_kernel(f, w, _as_floats(z_star), theta, wnorm))


def scalarize_ipbi(f, w, z_nad, theta: float) -> float:
    """Inverted PBI d1 - theta * d2 measured from the nadir estimate.

    This value is MAXIMIZED; use a sign-aware comparison.
    """
    f, w = _pair(f, w)
    wnorm = float(np.linalg.norm(w))
    if wnorm == 0.0:
        raise ContractViolation("IPBI requires a non-zero weight vector")
    return float(_ipbi_kernel(f, w, _as_floats(z_nad), theta, wnorm))


def scalarize(choice: ScalarizerChoice, f, w, z_star=None, z_nad=None) -> float:
    """Dispatch on a ScalarizerChoice; anchors are required per kind."""
    if choice.kind == "WS":
        return scalarize_ws(f, w)
    if choice.kind == "TCH":
        return scalarize_tch(f, w, z_star)
    if choice.kind == "MTCH":
        return scalarize_mtch(f, w, z_star)
    if choice.kind == "PBI":
        return scalarize_pbi(f, w, z_star, choice.theta)
    return scalarize_ipbi(f, w, z_nad, choice.theta)


def normalize(f, z_star, z_nad, eps_norm: float) -> np.ndarray:
    """Componentwise (f - z*) / (z_nad - z* + eps_norm).

    ``z_star`` here is the estimated ideal point with a zero eps shift.  The
    additive ``eps_norm`` keeps the denominator positive when an axis has
    collapsed (z_nad == z*), in which case that component maps to 0.
    """
    if eps_norm <= 0.0:
        raise ContractViolation("eps_norm must be positive")
    f = _as_floats(f)
    z_star = _as_floats(z_star)
    z_nad = _as_floats(z_nad)
    return (f - z_star) / (z_nad - z_star + eps_norm)
