"""moeadtk: decomposition-based multi-objective optimization toolkit.

MOEA/D with a configurable component space (five scalarizers, dual
neighborhoods, a dynamic reference point, pluggable variation operators, and
objective normalization), an unbounded evaluation archive, exact hypervolume
and IGD indicators, subset selection from archives, and an offline GA
hyper-heuristic that tunes configurations under the final-population or the
solution-selection output framework.
"""
from .core import (
    Archive,
    ContractViolation,
    ProblemHandle,
    RandomSource,
    Solution,
    dominates,
    nondominated_filter,
)
from .decomposition import (
    ScalarizerChoice,
    WeightLattice,
    das_dennis,
    epsilon_schedule,
    normalize,
    reference_point,
    scalarize_ipbi,
    scalarize_mtch,
    scalarize_pbi,
    scalarize_tch,
    scalarize_ws,
)
from .indicators import HvReferenceFrame, hypervolume, igd, normalize_for_indicator
from .moead import MoeadConfig, RunResult, run_moead
from .operators import VariationConfig, crossover, mutate
from .problems import (
    ProblemSpec,
    ReferenceSet,
    evaluate_problem,
    ideal_nadir,
    load_reference_file,
    make_problem,
    sample_true_front,
)
from .subset_selection import (
    distance_based_select,
    greedy_hv_select,
    greedy_hv_select_eager,
    greedy_igd_select,
)

__version__ = "0.1.0"

__all__ = [
    "Archive",
    "ContractViolation",
    "HvReferenceFrame",
    "MoeadConfig",
    "ProblemHandle",
    "ProblemSpec",
    "RandomSource",
    "ReferenceSet",
    "RunResult",
    "ScalarizerChoice",
    "Solution",
    "VariationConfig",
    "WeightLattice",
    "crossover",
    "das_dennis",
    "distance_based_select",
    "dominates",
    "epsilon_schedule",
    "evaluate_problem",
    "greedy_hv_select",
    "greedy_hv_select_eager",
    "greedy_igd_select",
    "hypervolume",
    "ideal_nadir",
    "igd",
    "load_reference_file",
    "make_problem",
    "mutate",
    "nondominated_filter",
    "normalize",
    "normalize_for_indicator",
    "reference_point",
    "run_moead",
    "sample_true_front",
    "scalarize_ipbi",
    "scalarize_mtch",
    "scalarize_pbi",
    "scalarize_tch",
    "scalarize_ws",
]
