"""Foundational types: solutions, archives, problems, randomness, Pareto dominance.

Everything downstream (decomposition, search loop, indicators, tuning) builds on
the small vocabulary defined here.  Minimization is the single convention for
objective comparison throughout the package; maximizing scalarizers handle their
orientation internally and never negate stored objectives.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Sequence

import numpy as np
from numba import njit


class ContractViolation(ValueError):
    """Raised when an operation's precondition or postcondition is broken."""


def _as_floats(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ContractViolation(f"expected a 1-D vector, got shape {arr.shape}")
    return arr


def check_objectives(values, m: int | None = None) -> np.ndarray:
    """Validate an objective vector: 1-D, finite, optionally of length ``m``."""
    arr = _as_floats(values)
    if m is not None and arr.shape[0] != m:
        raise ContractViolation(f"objective vector has length {arr.shape[0]}, expected {m}")
    if not np.isfinite(arr).all():
        raise ContractViolation(f"objective vector contains non-finite entries: {arr}")
    return arr


@dataclass(eq=False)
class Solution:
    """One evaluated point: decision vector, objective vector, evaluation index.

    ``eval_index`` is the position in the run's evaluation order and is unique
    within a run.  Objectives are exactly ``problem.evaluate(decision)``.
    """

    decision: np.ndarray
    objectives: np.ndarray
    eval_index: int

    def __post_init__(self):
        if self.eval_index < 0:
            raise ContractViolation("eval_index must be non-negative")


@dataclass(frozen=True)
class ProblemHandle:
    """A box-constrained continuous problem with a pure, deterministic evaluator."""

    name: str
    m: int
    d: int
    lower: np.ndarray
    upper: np.ndarray
    evaluate: Callable[[np.ndarray], np.ndarray]

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=np.float64)
        upper = np.asarray(self.upper, dtype=np.float64)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower.shape != (self.d,) or upper.shape != (self.d,):
            raise ContractViolation("bounds must have shape (d,)")
        if not (lower < upper).all():
            raise ContractViolation("lower bounds must be strictly below upper bounds")

    def check_decision(self, x) -> np.ndarray:
        x = _as_floats(x)
        if x.shape[0] != self.d:
            raise ContractViolation(f"decision vector has length {x.shape[0]}, expected {self.d}")
        if (x < self.lower).any() or (x > self.upper).any():
            raise ContractViolation(f"decision vector out of bounds for {self.name}")
        return x


class Archive:
    """Append-only record of every evaluated solution in a run.

    Nothing is ever filtered or removed: after a run, ``len(archive)`` equals
    the evaluation budget exactly.  The dump format is one solution per line,
    tab-separated ``eval_index, x_1..x_D, f_1..f_M``, reals printed with 17
    significant digits so a reload is bit-faithful.
    """

    def __init__(self, entries: Sequence[Solution] = ()):
        self._entries: list[Solution] = list(entries)

    @classmethod
    def from_arrays(cls, decisions: np.ndarray, objectives: np.ndarray) -> "Archive":
        if decisions.shape[0] != objectives.shape[0]:
            raise ContractViolation("decision/objective row counts differ")
        archive = cls()
        archive._entries = [
            Solution(decisions[i], objectives[i], i) for i in range(decisions.shape[0])
        ]
        return archive

    def record(self, solution: Solution) -> None:
        self._entries.append(solution)

    @property
    def entries(self) -> tuple[Solution, ...]:
        return tuple(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[Solution]:
        return iter(self._entries)

    def __getitem__(self, i: int) -> Solution:
        return self._entries[i]

    def objectives(self) -> np.ndarray:
        """All objective vectors as an (n, M) matrix, in evaluation order."""
        if not self._entries:
            return np.empty((0, 0))
        return np.stack([s.objectives for s in self._entries])

    def decisions(self) -> np.ndarray:
        if not self._entries:
            return np.empty((0, 0))
        return np.stack([s.decision for s in self._entries])

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            for s in self._entries:
                cols = [str(s.eval_index)]
                cols += [format(v, ".17g") for v in s.decision]
                cols += [format(v, ".17g") for v in s.objectives]
                fh.write("\t".join(cols) + "\n")

    @classmethod
    def load(cls, path, d: int, m: int) -> "Archive":
        archive = cls()
        with open(path) as fh:
            for lineno, line in enumerate(fh, start=1):
                parts = line.split()
                if not parts:
                    continue
                if len(parts) != 1 + d + m:
                    raise ContractViolation(
                        f"{path}:{lineno}: expected {1 + d + m} columns, got {len(parts)}"
                    )
                idx = int(parts[0])
                x = np.array([float(v) for v in parts[1 : 1 + d]])
                f = np.array([float(v) for v in parts[1 + d :]])
                archive.record(Solution(x, f, idx))
        return archive


@dataclass
class RandomSource:
    """Seeded random stream with derivable independent sub-streams.

    Identical seeds give identical draw sequences.  ``spawn(key)`` derives a
    stream that is independent of the parent and of siblings, keyed only by
    ``(seed, key)`` so parallel work can be assigned deterministically.
    """

    seed: int
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        self.generator = np.random.default_rng(np.random.SeedSequence(self.seed))

    def spawn(self, *key: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=key))

    def spawn_seed(self, *key: int) -> int:
        """A 63-bit integer seed derived from (seed, key), for handing to workers."""
        seq = np.random.SeedSequence(self.seed, spawn_key=key)
        return int(seq.generate_state(1, np.uint64)[0] >> np.uint64(1))


def dominates(a, b) -> bool:
    """Pareto dominance under minimization: ``a`` is no worse everywhere and
    strictly better somewhere."""
    a = _as_floats(a)
    b = _as_floats(b)
    if a.shape != b.shape:
        raise ContractViolation("dominance requires vectors of equal length")
    return bool((a <= b).all() and (a < b).any())


@njit(cache=True)
def _nondominated_mask(pts):
    """Boolean keep-mask of Pareto-optimal rows (minimization).

    Points are scanned in ascending order of coordinate sum; a dominator always
    has a strictly smaller sum, so checking each point against the survivors
    seen so far is sufficient.
    """
    n, m = pts.shape
    sums = np.empty(n, np.float64)
    for i in range(n):
        s = 0.0
        for d in range(m):
            s += pts[i, d]
        sums[i] = s
    order = np.argsort(sums, kind="mergesort")
    keep = np.zeros(n, np.bool_)
    kept = np.empty(n, np.int64)
    nk = 0
    for oi in range(n):
        i = order[oi]
        dominated = False
        for kj in range(nk):
            j = kept[kj]
            all_le = True
            any_lt = False
            for d in range(m):
                pj = pts[j, d]
                pi = pts[i, d]
                if pj > pi:
                    all_le = False
                    break
                if pj < pi:
                    any_lt = True
            if all_le and any_lt:
                dominated = True
                break
        if not dominated:
            keep[i] = True
            kept[nk] = i
            nk += 1
    return keep


def nondominated_filter(points) -> list[int]:
    """Indices of all points not dominated by any other point in the list.

    Duplicates are mutually non-dominated and are all retained; the returned
    indices are in the original order.
    """
    if len(points) == 0:
        return []
    pts = np.ascontiguousarray(np.asarray(points, dtype=np.float64))
    if pts.ndim != 2:
        raise ContractViolation("expected a list of equal-length vectors")
    mask = _nondominated_mask(pts)
    return [int(i) for i in np.flatnonzero(mask)]
