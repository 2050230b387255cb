"""Batch evaluation protocol: repeated seeded runs scored under both output
frameworks, rank-sum significance tests, and table emission.

A cell (problem, variant) executes its runs once; each run's archive is then
scored twice: the final population as-is (FP framework) and a greedy-selected
subset of the archive's non-dominated solutions (SS framework).  Scoring uses
the true-front frame: analytic ideal/nadir (or a supplied reference file) with
the hypervolume reference point at 1.1 in normalized space.  Reported
hypervolume values are on the ratio scale (divided by 1.1**M), which keeps
them comparable across problems.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .core import ContractViolation, RandomSource, nondominated_filter
from .decomposition import ScalarizerChoice
from .indicators import HvReferenceFrame, hypervolume_ratio, igd, normalize_for_indicator
from .moead import MoeadConfig, run_moead
from .operators import VariationConfig
from .problems import ReferenceSet, load_reference_file, ideal_nadir, sample_true_front
from .subset_selection import greedy_hv_select, greedy_igd_select

STANDARD_VARIANTS = ("WS", "TCH", "MTCH", "PBI", "IPBI")

WORKERS_ENV = "MOEADTK_WORKERS"


def worker_count(explicit: int | None = None) -> int:
    if explicit is not None:
        return max(1, explicit)
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def standard_variant(name: str, budget: int = 10_000) -> MoeadConfig:
    """The untuned baseline configuration for one scalarizer: population 91,
    both neighborhoods of absolute size 20, SBX (p_c=1, eta=20), polynomial
    mutation (p_m=1/D, eta=20), zero reference-point offsets, theta 5 for PBI
    and 0.1 for IPBI, normalization epsilon 1e-6."""
    name = name.upper()
    if name not in STANDARD_VARIANTS:
        raise ContractViolation(f"unknown standard variant {name!r}")
    theta = {"PBI": 5.0, "IPBI": 0.1}.get(name)
    return MoeadConfig(
        scalarizer=ScalarizerChoice(name, theta),
        eps_ini=0.0,
        eps_end=0.0,
        t_mate_size=20,
        t_rep_size=20,
        eps_norm=1e-6,
        variation=VariationConfig(crossover="SBX", p_c=1.0,
                                  mutation="Polynomial", p_m=None),
        population=91,
        budget=budget,
    )


def true_front_frame(problem: str, reference_file: str | None = None,
                     count: int = 10_000) -> tuple[HvReferenceFrame, ReferenceSet]:
    """Evaluation frame and IGD reference set from the true front (or a file)."""
    if reference_file is not None:
        refset = load_reference_file(reference_file)
    else:
        refset = sample_true_front(problem, count)
    ideal, nadir = ideal_nadir(refset)
    return HvReferenceFrame(ideal, nadir, 1.1), refset


@dataclass(frozen=True)
class ExperimentPlan:
    """What to run: problems x named variants, scored by the listed indicators
    under the listed frameworks, with one execution per (problem, seed)."""

    problems: tuple[str, ...]
    variants: dict[str, MoeadConfig]
    baseline: str
    runs: int = 31
    seeds: tuple[int, ...] | None = None
    budget: int = 10_000
    indicators: tuple[str, ...] = ("hv",)
    frameworks: tuple[str, ...] = ("fp", "ss")
    selection_size: int = 91
    reference_files: dict[str, str] = field(default_factory=dict)
    front_samples: int = 10_000

    def __post_init__(self):
        if len(self.variants) < 2:
            raise ContractViolation("a comparison needs at least two variants")
        if self.runs < 2:
            raise ContractViolation("the statistical test needs at least two runs")
        if self.baseline not in self.variants:
            raise ContractViolation(f"baseline {self.baseline!r} is not a variant")
        for ind in self.indicators:
            if ind not in ("hv", "igd"):
                raise ContractViolation(f"unknown indicator {ind!r}")
        for fw in self.frameworks:
            if fw not in ("fp", "ss"):
                raise ContractViolation(f"unknown framework {fw!r}")

    def seed_list(self) -> list[int]:
        if self.seeds is not None:
            return list(self.seeds)
        return list(range(1, self.runs + 1))


def score_run(result, frame: HvReferenceFrame, refset: ReferenceSet | None,
              indicators=("hv",), frameworks=("fp", "ss"),
              selection_size: int = 91) -> dict[tuple[str, str], float]:
    """Score one run's final population and archive subset under the frame.

    SS-framework subsets come from the non-dominated portion of the archive:
    greedy hypervolume inclusion when scoring HV, greedy IGD inclusion when
    scoring IGD.  Returns {(framework, indicator): value}.
    """
    out: dict[tuple[str, str], float] = {}
    final_objs = np.stack([s.objectives for s in result.final_population])
    if refset is not None:
        ref_norm = normalize_for_indicator(refset.points, frame)
    if "fp" in frameworks:
        if "hv" in indicators:
            out[("fp", "hv")] = hypervolume_ratio(final_objs, frame)
        if "igd" in indicators:
            out[("fp", "igd")] = igd(normalize_for_indicator(final_objs, frame), ref_norm)
    if "ss" in frameworks:
        arch = result.archive.objectives()
        front = arch[nondominated_filter(arch)]
        if "hv" in indicators:
            picked = greedy_hv_select(front, selection_size, frame)
            out[("ss", "hv")] = hypervolume_ratio(front[picked], frame)
        if "igd" in indicators:
            picked = greedy_igd_select(front, selection_size, refset, frame)
            out[("ss", "igd")] = igd(normalize_for_indicator(front[picked], frame), ref_norm)
    return out


_POOL_STATE: dict = {}


def _pool_init(problem, config, frame, refset, indicators, frameworks, selection_size):
    _POOL_STATE.update(problem=problem, config=config, frame=frame,
                       refset=refset, indicators=indicators,
                       frameworks=frameworks, selection_size=selection_size)


def _pool_run(seed: int):
    s = _POOL_STATE
    result = run_moead(s["problem"], s["config"], seed)
    return score_run(result, s["frame"], s["refset"], s["indicators"],
                     s["frameworks"], s["selection_size"])


def run_cell(plan: ExperimentPlan, problem: str, variant: str,
             workers: int | None = None) -> dict[tuple[str, str], list[float]]:
    """Execute one (problem, variant) cell: all seeds once, dual scoring.

    Deterministic for any worker count: work is keyed by seed and collected in
    seed order.
    """
    config = replace(plan.variants[variant], budget=plan.budget)
    frame, refset = true_front_frame(problem, plan.reference_files.get(problem),
                                     plan.front_samples)
    if "igd" in plan.indicators and refset is None:
        raise ContractViolation("IGD scoring needs a reference set")
    seeds = plan.seed_list()
    nworkers = worker_count(workers)
    if nworkers <= 1 or len(seeds) <= 1:
        per_run = [_score_inline(problem, config, seed, frame, refset, plan)
                   for seed in seeds]
    else:
        import multiprocessing as mp

        ctx = mp.get_context("fork")
        with ctx.Pool(min(nworkers, len(seeds)), initializer=_pool_init,
                      initargs=(problem, config, frame, refset, plan.indicators,
                                plan.frameworks, plan.selection_size)) as pool:
            per_run = pool.map(_pool_run, seeds)
    out: dict[tuple[str, str], list[float]] = {}
    for key in per_run[0]:
        out[key] = [r[key] for r in per_run]
    return out


def _score_inline(problem, config, seed, frame, refset, plan):
    result = run_moead(problem, config, seed)
    return score_run(result, frame, refset, plan.indicators, plan.frameworks,
                     plan.selection_size)


def run_plan(plan: ExperimentPlan, workers: int | None = None,
             progress=None) -> dict[tuple[str, str], dict[tuple[str, str], list[float]]]:
    """All cells of the plan; returns {(problem, variant): {(fw, ind): values}}."""
    results = {}
    for problem in plan.problems:
        for variant in plan.variants:
            results[(problem, variant)] = run_cell(plan, problem, variant, workers)
            if progress is not None:
                progress(problem, variant)
    return results


# --- two-sided rank-sum test ------------------------------------------------


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(len(values))
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def rank_sum_p_value(a, b) -> float:
    """Two-sided Mann-Whitney rank-sum p-value: mid-rank ties, tie-corrected
    normal approximation with continuity correction.  All-tied samples give 1.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n1, n2 = len(a), len(b)
    if n1 < 2 or n2 < 2:
        raise ContractViolation("both samples need at least two observations")
    pooled = np.concatenate([a, b])
    ranks = _midranks(pooled)
    r1 = ranks[:n1].sum()
    u1 = r1 - n1 * (n1 + 1) / 2.0
    u2 = n1 * n2 - u1
    u = max(u1, u2)
    n = n1 + n2
    _, counts = np.unique(pooled, return_counts=True)
    tie_term = float((counts.astype(np.float64) ** 3 - counts).sum())
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if var <= 0.0:
        return 1.0
    z = (u - n1 * n2 / 2.0 - 0.5) / math.sqrt(var)
    p = 2.0 * 0.5 * math.erfc(z / math.sqrt(2.0))
    return min(1.0, max(0.0, p))


def wilcoxon_rank_sum(a, b, alpha: float = 0.05,
                      larger_is_better: bool = True) -> str:
    """Classify sample ``b`` against sample ``a``: ``better``, ``worse`` or
    ``equivalent`` at significance ``alpha``; direction is decided by medians
    under the given metric orientation."""
    p = rank_sum_p_value(a, b)
    if p >= alpha:
        return "equivalent"
    ma = float(np.median(a))
    mb = float(np.median(b))
    if ma == mb:
        return "equivalent"
    b_is_better = (mb > ma) if larger_is_better else (mb < ma)
    return "better" if b_is_better else "worse"


# --- table emission ----------------------------------------------------------

_MARK = {"better": "+", "worse": "-", "equivalent": "="}


@dataclass(frozen=True)
class RenderedTable:
    text: str
    csv: str
    sign_counts: dict[str, tuple[int, int, int]]  # variant -> (+, -, =)


def emit_table(values: dict[str, dict[str, list[float]]], baseline: str,
               larger_is_better: bool = True, alpha: float = 0.05,
               seeds: list[int] | None = None) -> RenderedTable:
    """Render a mean-value grid with significance marks against the baseline.

    Rows are problems, columns variants.  Non-baseline cells carry +/-/= from
    the rank-sum test; the row's best mean is wrapped in ``[ ]`` and the worst
    in ``( )``.  The CSV holds the raw per-run values.
    """
    problems = list(values)
    if not problems:
        raise ContractViolation("empty result grid")
    variants = list(values[problems[0]])
    if baseline not in variants:
        raise ContractViolation(f"baseline {baseline!r} missing from the grid")
    runs = None
    for problem in problems:
        if list(values[problem]) != variants:
            raise ContractViolation(f"ragged grid: variant set differs for {problem}")
        for variant, cell in values[problem].items():
            if runs is None:
                runs = len(cell)
            if len(cell) != runs:
                raise ContractViolation(
                    f"ragged grid: run count differs at ({problem}, {variant})")

    counts = {v: [0, 0, 0] for v in variants if v != baseline}
    header = ["problem"] + variants
    rows = [header]
    for problem in problems:
        means = {v: float(np.mean(values[problem][v])) for v in variants}
        ordered = sorted(means.values(), reverse=larger_is_better)
        best, worst = ordered[0], ordered[-1]
        row = [problem]
        for variant in variants:
            cell = f"{means[variant]:.4f}"
            if means[variant] == best:
                cell = f"[{cell}]"
            elif means[variant] == worst:
                cell = f"({cell})"
            if variant != baseline:
                verdict = wilcoxon_rank_sum(values[problem][baseline],
                                            values[problem][variant],
                                            alpha, larger_is_better)
                cell += " " + _MARK[verdict]
                idx = {"better": 0, "worse": 1, "equivalent": 2}[verdict]
                counts[variant][idx] += 1
        # fall through for the baseline column: mean only
            row.append(cell)
        rows.append(row)
    summary = ["+/-/="]
    for variant in variants:
        if variant == baseline:
            summary.append("(base)")
        else:
            c = counts[variant]
            summary.append(f"{c[0]}/{c[1]}/{c[2]}")
    rows.append(summary)

    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
             for row in rows]
    text = "\n".join(lines) + "\n"

    csv_lines = ["problem,variant,run,seed,value"]
    for problem in problems:
        for variant in variants:
            for run_idx, value in enumerate(values[problem][variant]):
                seed = seeds[run_idx] if seeds else run_idx + 1
                csv_lines.append(f"{problem},{variant},{run_idx},{seed},{value!r}")
    csv = "\n".join(csv_lines) + "\n"

    sign_counts = {v: tuple(c) for v, c in counts.items()}
    return RenderedTable(text, csv, sign_counts)
