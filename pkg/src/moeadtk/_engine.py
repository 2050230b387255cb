"""Jitted inner loop of the decomposition search.

The kernels here operate on preallocated archive matrices and an incumbent
index vector, so the final population is structurally a subset of the archive.
Objective comparison happens on normalized values when normalization is
enabled: both candidate objectives and the scalarizer anchor (reference point
or nadir estimate) are mapped through (v - z_min) / (z_nad - z_min + eps_norm)
with the archive-wide minimum z_min and the current-population maximum z_nad.
z_min refreshes after every evaluation, z_nad after every replacement, and the
reference-point offset advances once per generation.

``freeze`` suspends all three updates for the duration of a call (the archive
still records); this analysis mode makes per-incumbent scalarized values
exactly monotone under replacement and is used by the invariant tests.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from .decomposition import (
    _ipbi_kernel,
    _mtch_kernel,
    _pbi_kernel,
    _tch_kernel,
    _ws_kernel,
)
from .operators import _crossover_into, _mutate_into
from .problems import eval_into


@njit(cache=True, inline="always")
def _g(kind, theta, f, w, wnorm, anchor):
    if kind == 0:
        return _ws_kernel(f, w)
    if kind == 1:
        return _tch_kernel(f, w, anchor)
    if kind == 2:
        return _mtch_kernel(f, w, anchor)
    if kind == 3:
        return _pbi_kernel(f, w, anchor, theta, wnorm)
    return _ipbi_kernel(f, w, anchor, theta, wnorm)


@njit(cache=True)
def _pop_nadir(arch_f, pop_idx, out):
    m = out.shape[0]
    for q in range(m):
        out[q] = -np.inf
    for i in range(pop_idx.shape[0]):
        row = pop_idx[i]
        for q in range(m):
            v = arch_f[row, q]
            if v > out[q]:
                out[q] = v


@njit(cache=True)
def init_population(pid, minus, kpos, lower, upper, arch_x, arch_f, pop_idx,
                    z_min, n, rng):
    d = lower.shape[0]
    m = arch_f.shape[1]
    for i in range(n):
        for q in range(d):
            arch_x[i, q] = lower[q] + rng.random() * (upper[q] - lower[q])
        eval_into(pid, minus, kpos, arch_x[i], arch_f[i])
        for q in range(m):
            if arch_f[i, q] != arch_f[i, q]:
                raise ValueError("objective evaluation produced NaN")
        pop_idx[i] = i
    for q in range(m):
        best = arch_f[0, q]
        for i in range(1, n):
            if arch_f[i, q] < best:
                best = arch_f[i, q]
        z_min[q] = best
    return n


@njit(cache=True)
def replacement_scan(weights, wnorms, repl_row, scal_kind, theta, eps_t,
                     eps_norm, do_norm, arch_f, pop_idx, z_min, znad, fchild,
                     child_index, freeze):
    """Compare one evaluated child against a replacement neighborhood.

    Walks the neighbor list in order; each strictly better comparison installs
    the child and (unless frozen) refreshes the population nadir before the
    next comparison.  Returns the number of replacements.
    """
    m = fchild.shape[0]
    nf_new = np.empty(m, np.float64)
    nf_old = np.empty(m, np.float64)
    anchor = np.empty(m, np.float64)
    replaced = 0
    for kk in range(repl_row.shape[0]):
        k = repl_row[kk]
        w = weights[k]
        finc = arch_f[pop_idx[k]]
        if do_norm:
            for q in range(m):
                den = znad[q] - z_min[q] + eps_norm
                nf_new[q] = (fchild[q] - z_min[q]) / den
                nf_old[q] = (finc[q] - z_min[q]) / den
                if scal_kind == 4:
                    anchor[q] = (znad[q] - z_min[q]) / den
                else:
                    anchor[q] = -eps_t / den
        else:
            for q in range(m):
                nf_new[q] = fchild[q]
                nf_old[q] = finc[q]
                if scal_kind == 4:
                    anchor[q] = znad[q]
                else:
                    anchor[q] = z_min[q] - eps_t
        g_new = _g(scal_kind, theta, nf_new, w, wnorms[k], anchor)
        g_old = _g(scal_kind, theta, nf_old, w, wnorms[k], anchor)
        better = g_new > g_old if scal_kind == 4 else g_new < g_old
        if better:
            pop_idx[k] = child_index
            replaced += 1
            if not freeze:
                _pop_nadir(arch_f, pop_idx, znad)
    return replaced


@njit(cache=True)
def advance(pid, minus, kpos, lower, upper, weights, wnorms, mate_nb, repl_nb,
            scal_kind, theta, eps_ini, eps_end, eps_norm, do_norm,
            cx_kind, p_c, eta_c, mut_kind, p_m, eta_m, sigma_frac,
            budget, arch_x, arch_f, pop_idx, z_min, evals_in, t_in,
            max_generations, freeze, rng):
    """Run whole generations until the budget or the generation cap is hit.

    One generation produces one child per subproblem in index order; the last
    generation may be cut short by the budget.  Returns (evaluations, t).
    """
    n = weights.shape[0]
    m = weights.shape[1]
    d = lower.shape[0]
    t_total = budget // n
    evals = evals_in
    t = t_in

    znad = np.empty(m, np.float64)
    _pop_nadir(arch_f, pop_idx, znad)
    zmin_c = z_min.copy() if freeze else z_min

    child = np.empty(d, np.float64)
    fchild = np.empty(m, np.float64)

    gens = 0
    while evals < budget and gens < max_generations:
        t += 1
        gens += 1
        ts = t if t < t_total else t_total
        if t_total <= 1:
            eps_t = eps_end
        else:
            eps_t = (eps_ini - eps_end) * (t_total - ts) / (t_total - 1.0) + eps_end
        for j in range(n):
            if evals >= budget:
                break
            tm = mate_nb.shape[1]
            a = rng.integers(0, tm)
            b = rng.integers(0, tm - 1)
            if b >= a:
                b += 1
            ia = pop_idx[mate_nb[j, a]]
            ib = pop_idx[mate_nb[j, b]]
            _crossover_into(cx_kind, p_c, eta_c, arch_x[ia], arch_x[ib],
                            lower, upper, rng, child)
            _mutate_into(mut_kind, p_m, eta_m, sigma_frac, lower, upper, rng, child)
            eval_into(pid, minus, kpos, child, fchild)
            for q in range(m):
                if fchild[q] != fchild[q]:
                    raise ValueError("objective evaluation produced NaN")
            ci = evals
            for q in range(d):
                arch_x[ci, q] = child[q]
            for q in range(m):
                arch_f[ci, q] = fchild[q]
            evals += 1
            if not freeze:
                for q in range(m):
                    if fchild[q] < z_min[q]:
                        z_min[q] = fchild[q]
            replacement_scan(weights, wnorms, repl_nb[j], scal_kind, theta,
                             eps_t, eps_norm, do_norm, arch_f, pop_idx,
                             zmin_c, znad, fchild, ci, freeze)
    return evals, t
