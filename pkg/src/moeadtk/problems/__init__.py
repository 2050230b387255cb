"""Benchmark problems: three-objective DTLZ1-4, WFG1-9, and their minus
versions, plus analytic Pareto-front samplers and reference-set loading.

Problems are selected by canonical names ``dtlz1..dtlz4`` and ``wfg1..wfg9``,
with the prefix ``minus-`` for the negated variants.  A minus problem returns
the componentwise negation of its base problem's objectives, so applying the
transform twice restores the base problem exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from ..core import ContractViolation, ProblemHandle
from . import _dtlz, _wfg

DTLZ_FAMILIES = ("dtlz1", "dtlz2", "dtlz3", "dtlz4")
WFG_FAMILIES = tuple(f"wfg{i}" for i in range(1, 10))
FAMILIES = DTLZ_FAMILIES + WFG_FAMILIES

# dispatch codes for the jitted evaluator: 1..4 DTLZ, 11..19 WFG
_PID = {name: i + 1 for i, name in enumerate(DTLZ_FAMILIES)}
_PID.update({name: 11 + i for i, name in enumerate(WFG_FAMILIES)})


@dataclass(frozen=True)
class ProblemSpec:
    """A benchmark instance: family, minus flag, objective count, and the
    position/distance variable counts (defaults follow the test-suite papers:
    DTLZ1 k=5, DTLZ2-4 k=10, WFG k=2(M-1) and l=20)."""

    family: str
    minus: bool = False
    m: int = 3
    k: int | None = None
    l: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ContractViolation(f"unknown problem family {self.family!r}")
        if self.m < 2:
            raise ContractViolation("need at least two objectives")
        if self.is_wfg:
            if self.position_count % (self.m - 1) != 0:
                raise ContractViolation("WFG position count k must be a multiple of M-1")
            if self.family in ("wfg2", "wfg3") and self.distance_count % 2 != 0:
                raise ContractViolation(f"{self.family} needs an even distance count l")
        if self.position_count <= 0 or (self.is_wfg and self.distance_count <= 0):
            raise ContractViolation("variable counts must be positive")

    @property
    def is_wfg(self) -> bool:
        return self.family.startswith("wfg")

    @property
    def position_count(self) -> int:
        if self.k is not None:
            return self.k
        if self.is_wfg:
            return 2 * (self.m - 1)
        return 5 if self.family == "dtlz1" else 10

    @property
    def distance_count(self) -> int:
        if not self.is_wfg:
            return self.position_count
        return 20 if self.l is None else self.l

    @property
    def d(self) -> int:
        if self.is_wfg:
            return self.position_count + self.distance_count
        # DTLZ: M-1 position variables plus k distance variables
        return self.m - 1 + self.position_count

    @property
    def name(self) -> str:
        return ("minus-" if self.minus else "") + self.family

    @property
    def base(self) -> "ProblemSpec":
        return ProblemSpec(self.family, False, self.m, self.k, self.l)


def parse_problem_name(name: str) -> ProblemSpec:
    name = name.strip().lower()
    minus = name.startswith("minus-")
    family = name[6:] if minus else name
    return ProblemSpec(family=family, minus=minus)


@dataclass(frozen=True)
class ReferenceSet:
    """Points on (or standing in for) a problem's true Pareto front."""

    points: np.ndarray  # (n, M)
    source: str  # "analytic" or "file"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ContractViolation("a reference set needs at least one point")

    @property
    def m(self) -> int:
        return self.points.shape[1]


@njit(cache=True)
def eval_into(pid, minus, kpos, x, out):
    """Dispatch a problem evaluation into ``out``; negates for minus variants."""
    if pid <= 4:
        if pid == 1:
            _dtlz.dtlz1(x, out)
        elif pid == 2:
            _dtlz.dtlz2(x, out)
        elif pid == 3:
            _dtlz.dtlz3(x, out)
        else:
            _dtlz.dtlz4(x, out)
    else:
        _wfg.wfg_eval(pid - 10, x, kpos, out)
    if minus:
        for j in range(out.shape[0]):
            out[j] = -out[j]


def bounds_for(spec: ProblemSpec) -> tuple[np.ndarray, np.ndarray]:
    if spec.is_wfg:
        upper = 2.0 * np.arange(1, spec.d + 1, dtype=np.float64)
    else:
        upper = np.ones(spec.d)
    return np.zeros(spec.d), upper


def make_problem(spec: ProblemSpec | str) -> ProblemHandle:
    """Build a ProblemHandle for a spec or canonical name."""
    if isinstance(spec, str):
        spec = parse_problem_name(spec)
    lower, upper = bounds_for(spec)
    pid = _PID[spec.family]
    minus = spec.minus
    kpos = spec.position_count if spec.is_wfg else 0
    m = spec.m

    def evaluate(x: np.ndarray) -> np.ndarray:
        out = np.empty(m, dtype=np.float64)
        eval_into(pid, minus, kpos, np.asarray(x, dtype=np.float64), out)
        return out

    handle = ProblemHandle(spec.name, m, spec.d, lower, upper, evaluate)
    object.__setattr__(handle, "spec", spec)
    object.__setattr__(handle, "pid", pid)
    object.__setattr__(handle, "kpos", kpos)
    return handle


def evaluate_problem(spec: ProblemSpec | str, x) -> np.ndarray:
    """Evaluate one decision vector, checking the box bounds first."""
    handle = make_problem(spec)
    return handle.evaluate(handle.check_decision(x))


def load_reference_file(path) -> ReferenceSet:
    """Read an objective-only reference set: M whitespace-separated columns per
    line, arity fixed by the first data line."""
    rows = []
    m = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            try:
                vals = [float(v) for v in parts]
            except ValueError as exc:
                raise ContractViolation(f"{path}:{lineno}: {exc}") from None
            if m is None:
                m = len(vals)
            elif len(vals) != m:
                raise ContractViolation(
                    f"{path}:{lineno}: expected {m} columns, got {len(vals)}"
                )
            rows.append(vals)
    if not rows:
        raise ContractViolation(f"{path}: reference file contains no points")
    return ReferenceSet(np.asarray(rows), "file")


def sample_true_front(spec: ProblemSpec | str, count: int) -> ReferenceSet:
    """Deterministic, well-spread sample of approximately ``count`` points on
    the analytic Pareto front.  Base WFG3's front has a partial ("flag")
    region with no usable closed form; load a reference file for it instead.
    """
    from . import fronts

    if isinstance(spec, str):
        spec = parse_problem_name(spec)
    if count < 1:
        raise ContractViolation("count must be >= 1")
    if spec.family == "wfg3" and not spec.minus:
        raise ContractViolation(
            "wfg3 has no analytic front sampler; supply a reference set file "
            "via load_reference_file()"
        )
    return ReferenceSet(fronts.sample(spec, count), "analytic")


def ideal_nadir(spec_or_refset, count: int = 10_000) -> tuple[np.ndarray, np.ndarray]:
    """Componentwise extremes of the true front (sampled analytically, or of a
    supplied reference set)."""
    if isinstance(spec_or_refset, ReferenceSet):
        pts = spec_or_refset.points
    else:
        pts = sample_true_front(spec_or_refset, count).points
    ideal = pts.min(axis=0)
    nadir = pts.max(axis=0)
    if (ideal == nadir).any():
        raise ContractViolation("degenerate front: ideal equals nadir in some component")
    return ideal, nadir
