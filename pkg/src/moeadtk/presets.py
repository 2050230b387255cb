"""Bundled tuned configurations, one per (problem, framework).

The TSV files mirror the tuned-configuration tables: scalarizer, theta,
reference-point offsets, normalization epsilon, neighborhood percentages,
crossover and mutation with their rates.  A ``-`` marks fields the row does
not use (theta outside PBI/IPBI; reference-point offsets under WS; the
crossover operator when p_c is zero, stored as SBX since it is never applied).
"""
from __future__ import annotations

from importlib import resources

from .core import ContractViolation
from .decomposition import ScalarizerChoice
from .moead import MoeadConfig
from .operators import VariationConfig

FRAMEWORK_FILES = {
    "fp": "tuned_fp.tsv",
    "final_population": "tuned_fp.tsv",
    "ss": "tuned_ss.tsv",
    "solution_selection": "tuned_ss.tsv",
}

_cache: dict[str, dict[str, dict[str, str]]] = {}


def _load_table(filename: str) -> dict[str, dict[str, str]]:
    if filename not in _cache:
        text = resources.files("moeadtk.data").joinpath(filename).read_text()
        lines = [ln for ln in text.splitlines() if ln.strip()]
        header = lines[0].split("\t")
        table = {}
        for line in lines[1:]:
            cells = line.split("\t")
            row = dict(zip(header, cells))
            table[row["problem"]] = row
        _cache[filename] = table
    return _cache[filename]


def _percent(value: str) -> float:
    return float(value.rstrip("%")) / 100.0


def tuned_config(problem: str, framework: str, budget: int = 10_000) -> MoeadConfig:
    """The tuned configuration for a problem under ``fp`` or ``ss``."""
    key = framework.lower()
    if key not in FRAMEWORK_FILES:
        raise ContractViolation(f"unknown framework {framework!r}")
    table = _load_table(FRAMEWORK_FILES[key])
    name = problem.strip().lower()
    if name not in table:
        raise ContractViolation(f"no tuned configuration for {problem!r}")
    row = table[name]

    kind = row["g"]
    theta = None if row["theta"] == "-" else float(row["theta"])
    eps_ini = 0.0 if row["eps_ini"] == "-" else float(row["eps_ini"])
    eps_end = 0.0 if row["eps_end"] == "-" else float(row["eps_end"])
    crossover = "SBX" if row["crossover"] == "-" else row["crossover"]
    variation = VariationConfig(
        crossover=crossover,
        p_c=float(row["p_c"]),
        mutation=row["mutation"],
        p_m=float(row["p_m"]),
    )
    return MoeadConfig(
        scalarizer=ScalarizerChoice(kind, theta),
        eps_ini=eps_ini,
        eps_end=eps_end,
        t_mate_frac=_percent(row["t_mate"]),
        t_rep_frac=_percent(row["t_rep"]),
        eps_norm=float(row["eps_norm"]),
        variation=variation,
        population=91,
        budget=budget,
    )


def tuned_problems(framework: str = "fp") -> list[str]:
    return list(_load_table(FRAMEWORK_FILES[framework.lower()]))
