"""Operator tests.

The kernels draw from a numpy Generator in a documented order (crossover gate,
operator draws, then per-variable mutation gate + draw).  The replay helpers
below consume an identically seeded Generator in that order and apply the
textbook formulas, so any drift in either the draw order or the arithmetic
shows up as an exact mismatch.
"""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from moeadtk.core import ContractViolation
from moeadtk.operators import VariationConfig, crossover, mutate, variation


def sbx_pair(p1, p2, beta):
    c1 = 0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2)
    c2 = 0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2)
    return c1, c2


def replay_crossover(cfg, p1, p2, rng):
    out = np.empty_like(p1)
    if rng.random() >= cfg.p_c:
        return p1.copy()
    if cfg.crossover == "SBX":
        for i in range(len(p1)):
            if rng.random() <= 0.5:
                u = rng.random()
                if u <= 0.5:
                    beta = (2.0 * u) ** (1.0 / (cfg.eta_c + 1.0))
                else:
                    beta = (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (cfg.eta_c + 1.0))
                c1, c2 = sbx_pair(p1[i], p2[i], beta)
                out[i] = c1 if rng.random() <= 0.5 else c2
            else:
                out[i] = p1[i]
    elif cfg.crossover == "WAX":
        alpha = rng.random()
        out[:] = [alpha * a + (1.0 - alpha) * b for a, b in zip(p1, p2)]
    else:
        for i in range(len(p1)):
            alpha = rng.random()
            out[i] = alpha * p1[i] + (1.0 - alpha) * p2[i]
    return out


def replay_mutation(cfg, x, lower, upper, rng):
    out = x.copy()
    p_m = cfg.resolved_p_m(len(x))
    for i in range(len(x)):
        if rng.random() >= p_m:
            continue
        lo, hi = lower[i], upper[i]
        span = hi - lo
        if cfg.mutation == "Polynomial":
            u = rng.random()
            if u < 0.5:
                frac = (out[i] - lo) / span
                val = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - frac) ** (cfg.eta_m + 1.0)
                delta = val ** (1.0 / (cfg.eta_m + 1.0)) - 1.0
            else:
                frac = (hi - out[i]) / span
                val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - frac) ** (cfg.eta_m + 1.0)
                delta = 1.0 - val ** (1.0 / (cfg.eta_m + 1.0))
            out[i] = out[i] + delta * span
        elif cfg.mutation == "Gaussian":
            out[i] = out[i] + rng.normal(0.0, cfg.sigma_frac * span)
        else:
            out[i] = lo + rng.random() * span
        out[i] = min(max(out[i], lo), hi)
    return out


@pytest.mark.parametrize("kind", ["SBX", "WAX", "LAX"])
def test_crossover_matches_replay(kind, rng):
    cfg = VariationConfig(crossover=kind, p_c=0.8)
    for seed in range(30):
        p1 = rng.random(6) * 4 - 2
        p2 = rng.random(6) * 4 - 2
        got = crossover(cfg, p1, p2, np.random.default_rng(seed))
        expected = replay_crossover(cfg, p1, p2, np.random.default_rng(seed))
        assert np.array_equal(got, expected)


@pytest.mark.parametrize("kind", ["Polynomial", "Gaussian", "Random"])
def test_mutation_matches_replay(kind, rng):
    cfg = VariationConfig(mutation=kind, p_m=0.7)
    lower = np.array([0.0, -1.0, 2.0, 0.0])
    upper = np.array([1.0, 3.0, 8.0, 0.5])
    for seed in range(30):
        x = lower + rng.random(4) * (upper - lower)
        got = mutate(cfg, x, (lower, upper), np.random.default_rng(seed))
        expected = replay_mutation(cfg, x, lower, upper, np.random.default_rng(seed))
        assert np.array_equal(got, expected)


def test_pc_zero_copies_parent1(rng):
    cfg = VariationConfig(crossover="SBX", p_c=0.0)
    p1, p2 = rng.random(5), rng.random(5)
    assert np.array_equal(crossover(cfg, p1, p2, np.random.default_rng(0)), p1)


def test_pm_zero_is_identity(rng):
    cfg = VariationConfig(p_m=0.0)
    x = rng.random(5)
    got = mutate(cfg, x, (np.zeros(5), np.ones(5)), np.random.default_rng(0))
    assert np.array_equal(got, x)


def test_wax_formula_midpoint_at_half():
    # the arithmetic recombination at alpha = 1/2 is the componentwise midpoint
    p1, p2 = np.array([0.0, 4.0]), np.array([2.0, 0.0])
    alpha = 0.5
    child = alpha * p1 + (1.0 - alpha) * p2
    assert np.array_equal(child, [1.0, 2.0])
    # and the operator realizes exactly that formula for its drawn alpha
    cfg = VariationConfig(crossover="WAX", p_c=1.0)
    got = crossover(cfg, p1, p2, np.random.default_rng(3))
    r = np.random.default_rng(3)
    r.random()  # gate
    a = r.random()
    assert np.array_equal(got, a * p1 + (1.0 - a) * p2)


def test_wax_single_alpha_lax_per_variable(rng):
    p1 = np.zeros(6)
    p2 = np.ones(6)
    wax = crossover(VariationConfig(crossover="WAX", p_c=1.0), p1, p2,
                    np.random.default_rng(1))
    alphas = 1.0 - wax  # child = alpha*0 + (1-alpha)*1
    assert np.unique(alphas).size == 1
    lax = crossover(VariationConfig(crossover="LAX", p_c=1.0), p1, p2,
                    np.random.default_rng(1))
    assert np.unique(1.0 - lax).size > 1


def test_sbx_spread_one_yields_parents():
    p1, p2 = np.array([1.0, -2.0]), np.array([3.0, 5.0])
    c1, c2 = sbx_pair(p1, p2, 1.0)
    assert np.array_equal(c1, p1) and np.array_equal(c2, p2)


def test_polynomial_delta_zero_at_half():
    # u = 0.5 leaves the variable unchanged
    cfg = VariationConfig(mutation="Polynomial")
    x = np.array([0.3])
    out = replay_mutation(cfg, x, np.zeros(1), np.ones(1),
                          _ScriptedDraws([0.0, 0.5]))
    assert out[0] == 0.3


class _ScriptedDraws:
    """Stands in for a Generator inside the pure-python replay helpers."""

    def __init__(self, values):
        self._values = list(values)

    def random(self):
        return self._values.pop(0)

    def normal(self, mu, sigma):
        return self._values.pop(0)


def test_identical_parents_fixed_point(rng):
    p = rng.random(5)
    for kind in ("WAX", "LAX"):
        cfg = VariationConfig(crossover=kind, p_c=1.0)
        child = crossover(cfg, p, p, np.random.default_rng(7))
        assert np.allclose(child, p)


def test_random_mutation_uniform_in_box(rng):
    cfg = VariationConfig(mutation="Random", p_m=1.0)
    lower, upper = np.array([2.0]), np.array([5.0])
    gen = np.random.default_rng(0)
    draws = np.array([mutate(cfg, np.array([3.0]), (lower, upper), gen)[0]
                      for _ in range(10_000)])
    assert draws.min() >= 2.0 and draws.max() <= 5.0
    stat = sps.kstest((draws - 2.0) / 3.0, "uniform")
    assert stat.pvalue > 1e-4


@given(st.integers(0, 5000), st.sampled_from(["SBX", "WAX", "LAX"]),
       st.sampled_from(["Polynomial", "Gaussian", "Random"]))
@settings(max_examples=60, deadline=None)
def test_variation_respects_bounds(seed, cx, mut):
    gen = np.random.default_rng(seed)
    lower = gen.random(5) * -3
    upper = gen.random(5) * 3 + 0.1
    cfg = VariationConfig(crossover=cx, p_c=0.9, mutation=mut, p_m=0.6,
                          sigma_frac=0.5)
    p1 = lower + gen.random(5) * (upper - lower)
    p2 = lower + gen.random(5) * (upper - lower)
    child = variation(cfg, p1, p2, (lower, upper), gen)
    assert (child >= lower).all() and (child <= upper).all()


def test_variation_deterministic(rng):
    cfg = VariationConfig(crossover="SBX", p_c=0.9, mutation="Gaussian", p_m=0.5)
    p1, p2 = rng.random(6), rng.random(6)
    bounds = (np.zeros(6), np.ones(6))
    a = variation(cfg, p1, p2, bounds, np.random.default_rng(11))
    b = variation(cfg, p1, p2, bounds, np.random.default_rng(11))
    assert np.array_equal(a, b)


def test_identity_when_both_rates_zero(rng):
    cfg = VariationConfig(p_c=0.0, p_m=0.0)
    p1, p2 = rng.random(4), rng.random(4)
    child = variation(cfg, p1, p2, (np.zeros(4), np.ones(4)),
                      np.random.default_rng(0))
    assert np.array_equal(child, p1)


def test_config_validation():
    with pytest.raises(ContractViolation):
        VariationConfig(crossover="BLX")
    with pytest.raises(ContractViolation):
        VariationConfig(p_c=1.5)
    with pytest.raises(ContractViolation):
        VariationConfig(sigma_frac=0.0)
    assert VariationConfig(p_m=None).resolved_p_m(10) == 0.1
