"""Variation operators: SBX / whole / local arithmetic crossover, polynomial /
Gaussian / random mutation.

One child per variation event (the search loop needs a single offspring per
subproblem).  All outputs are clamped into the box bounds.  Mutation rates are
per-variable.  The jitted kernels below are shared with the search engine so a
run driven through the public functions and a run driven by the engine consume
the random stream identically.

Draw order, per child: one crossover gate draw; then the operator's own draws
(SBX per variable: apply gate, spread, side pick; WAX: one alpha; LAX: one
alpha per variable); then per variable one mutation gate draw followed by the
mutation's draw if the gate fires.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import ContractViolation

CROSSOVER_KINDS = ("SBX", "WAX", "LAX")
MUTATION_KINDS = ("Polynomial", "Gaussian", "Random")

CX_SBX, CX_WAX, CX_LAX = range(3)
MUT_POLY, MUT_GAUSS, MUT_RANDOM = range(3)
CX_CODE = dict(zip(CROSSOVER_KINDS, range(3)))
MUT_CODE = dict(zip(MUTATION_KINDS, range(3)))


@dataclass(frozen=True)
class VariationConfig:
    """Operator choices and rates from the configuration space.

    ``p_m`` may be None, meaning "1/D", resolved against the problem at run
    setup.  ``sigma_frac`` scales the Gaussian step as a fraction of each
    variable's range (the literature leaves this open; it is an explicit knob).
    """

    crossover: str = "SBX"
    p_c: float = 1.0
    mutation: str = "Polynomial"
    p_m: float | None = None
    eta_c: float = 20.0
    eta_m: float = 20.0
    sigma_frac: float = 0.1

    def __post_init__(self):
        if self.crossover not in CROSSOVER_KINDS:
            raise ContractViolation(f"unknown crossover {self.crossover!r}")
        if self.mutation not in MUTATION_KINDS:
            raise ContractViolation(f"unknown mutation {self.mutation!r}")
        if not 0.0 <= self.p_c <= 1.0:
            raise ContractViolation("p_c must lie in [0, 1]")
        if self.p_m is not None and not 0.0 <= self.p_m <= 1.0:
            raise ContractViolation("p_m must lie in [0, 1]")
        if self.eta_c <= 0 or self.eta_m <= 0 or self.sigma_frac <= 0:
            raise ContractViolation("distribution indices and sigma_frac must be positive")

    def resolved_p_m(self, d: int) -> float:
        return 1.0 / d if self.p_m is None else self.p_m


@njit(cache=True)
def _crossover_into(kind, p_c, eta_c, p1, p2, lower, upper, rng, out):
    d = p1.shape[0]
    if rng.random() >= p_c:
        for i in range(d):
            out[i] = p1[i]
        return
    if kind == 0:  # SBX, one child: per-variable apply gate 0.5, then side pick
        for i in range(d):
            if rng.random() <= 0.5:
                u = rng.random()
                if u <= 0.5:
                    beta = (2.0 * u) ** (1.0 / (eta_c + 1.0))
                else:
                    beta = (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (eta_c + 1.0))
                c1 = 0.5 * ((1.0 + beta) * p1[i] + (1.0 - beta) * p2[i])
                c2 = 0.5 * ((1.0 - beta) * p1[i] + (1.0 + beta) * p2[i])
                out[i] = c1 if rng.random() <= 0.5 else c2
            else:
                out[i] = p1[i]
    elif kind == 1:  # WAX: one alpha for all variables
        alpha = rng.random()
        for i in range(d):
            out[i] = alpha * p1[i] + (1.0 - alpha) * p2[i]
    else:  # LAX: per-variable alpha
        for i in range(d):
            alpha = rng.random()
            out[i] = alpha * p1[i] + (1.0 - alpha) * p2[i]
    for i in range(d):
        if out[i] < lower[i]:
            out[i] = lower[i]
        elif out[i] > upper[i]:
            out[i] = upper[i]


@njit(cache=True)
def _mutate_into(kind, p_m, eta_m, sigma_frac, lower, upper, rng, x):
    d = x.shape[0]
    for i in range(d):
        if rng.random() >= p_m:
            continue
        lo = lower[i]
        hi = upper[i]
        span = hi - lo
        if kind == 0:  # polynomial (bounded)
            u = rng.random()
            if u < 0.5:
                frac = (x[i] - lo) / span
                val = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - frac) ** (eta_m + 1.0)
                delta = val ** (1.0 / (eta_m + 1.0)) - 1.0
            else:
                frac = (hi - x[i]) / span
                val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - frac) ** (eta_m + 1.0)
                delta = 1.0 - val ** (1.0 / (eta_m + 1.0))
            x[i] = x[i] + delta * span
        elif kind == 1:  # Gaussian step, fraction of the variable range
            x[i] = x[i] + rng.normal(0.0, sigma_frac * span)
        else:  # random: resample uniformly within the box
            x[i] = lo + rng.random() * span
        if x[i] < lo:
            x[i] = lo
        elif x[i] > hi:
            x[i] = hi


def crossover(cfg: VariationConfig, parent1, parent2, rng: np.random.Generator,
              bounds: tuple | None = None) -> np.ndarray:
    """With probability ``p_c`` recombine the parents with the configured
    operator, else copy parent1.  One child; clamped when bounds are given."""
    p1 = np.asarray(parent1, dtype=np.float64)
    p2 = np.asarray(parent2, dtype=np.float64)
    if bounds is None:
        lower = np.full(p1.shape[0], -np.inf)
        upper = np.full(p1.shape[0], np.inf)
    else:
        lower = np.asarray(bounds[0], dtype=np.float64)
        upper = np.asarray(bounds[1], dtype=np.float64)
    out = np.empty_like(p1)
    _crossover_into(CX_CODE[cfg.crossover], cfg.p_c, cfg.eta_c, p1, p2, lower, upper, rng, out)
    return out


def mutate(cfg: VariationConfig, x, bounds: tuple, rng: np.random.Generator) -> np.ndarray:
    """Mutate each variable independently with probability ``p_m``; clamp."""
    x = np.array(x, dtype=np.float64)
    lower = np.asarray(bounds[0], dtype=np.float64)
    upper = np.asarray(bounds[1], dtype=np.float64)
    p_m = cfg.resolved_p_m(x.shape[0])
    _mutate_into(MUT_CODE[cfg.mutation], p_m, cfg.eta_m, cfg.sigma_frac, lower, upper, rng, x)
    return x


def variation(cfg: VariationConfig, parent1, parent2, bounds: tuple,
              rng: np.random.Generator) -> np.ndarray:
    """Crossover followed by mutation, clamped to the problem bounds."""
    p1 = np.asarray(parent1, dtype=np.float64)
    p2 = np.asarray(parent2, dtype=np.float64)
    lower = np.asarray(bounds[0], dtype=np.float64)
    upper = np.asarray(bounds[1], dtype=np.float64)
    out = np.empty_like(p1)
    _crossover_into(CX_CODE[cfg.crossover], cfg.p_c, cfg.eta_c, p1, p2, lower, upper, rng, out)
    p_m = cfg.resolved_p_m(p1.shape[0])
    _mutate_into(MUT_CODE[cfg.mutation], p_m, cfg.eta_m, cfg.sigma_frac, lower, upper, rng, out)
    return out
