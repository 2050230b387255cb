"""The decomposition search loop: dual neighborhoods, scalarizer-driven
replacement, dynamic reference point, and full archive recording.

A run is deterministic given (problem, config, seed).  Initialization draws N
uniform in-bounds solutions and counts them against the evaluation budget;
afterwards each generation produces one child per subproblem (two distinct
parents drawn uniformly from the mating neighborhood, crossover + mutation),
evaluates it, and lets it replace every strictly inferior incumbent in the
replacement neighborhood.  Ties keep the incumbent.  The final generation may
be clipped by the budget.

The generation counter t runs 1..T with T = budget // N, so the reference
point offset reaches ``eps_end`` exactly on the last scheduled generation.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import ceil

import numpy as np

from . import _engine
from .core import Archive, ContractViolation, ProblemHandle, RandomSource, Solution
from .decomposition import (
    SCAL_CODE,
    ScalarizerChoice,
    WeightLattice,
    lattice_for_population,
)
from .operators import CX_CODE, MUT_CODE, VariationConfig
from .problems import make_problem


@dataclass(frozen=True)
class MoeadConfig:
    """One point in the component/parameter space.

    Neighborhood sizes are fractions of the population by default (ceil, with
    a floor of two so parents stay selectable); ``t_mate_size``/``t_rep_size``
    give absolute sizes instead, as used by the standard untuned variants.
    ``normalize=False`` switches off objective normalization entirely for
    sensitivity checks.
    """

    scalarizer: ScalarizerChoice = ScalarizerChoice("TCH")
    eps_ini: float = 0.0
    eps_end: float = 0.0
    t_mate_frac: float = 0.2
    t_rep_frac: float = 0.2
    t_mate_size: int | None = None
    t_rep_size: int | None = None
    eps_norm: float = 1e-6
    normalize: bool = True
    variation: VariationConfig = field(default_factory=VariationConfig)
    population: int = 91
    budget: int = 10_000

    def __post_init__(self):
        if not 0.0 <= self.eps_ini <= 10.0:
            raise ContractViolation("eps_ini must lie in [0, 10]")
        if not -5.0 <= self.eps_end <= 0.1:
            raise ContractViolation("eps_end must lie in [-5, 0.1]")
        for frac in (self.t_mate_frac, self.t_rep_frac):
            if not 0.0 < frac <= 1.0:
                raise ContractViolation("neighborhood fractions must lie in (0, 1]")
        if self.eps_norm <= 0.0:
            raise ContractViolation("eps_norm must be positive")
        if self.population < 2:
            raise ContractViolation("population must be at least 2")

    def mate_size(self) -> int:
        size = self.t_mate_size
        if size is None:
            size = ceil(self.t_mate_frac * self.population)
        return max(2, min(size, self.population))

    def rep_size(self) -> int:
        size = self.t_rep_size
        if size is None:
            size = ceil(self.t_rep_frac * self.population)
        return max(2, min(size, self.population))


def build_neighborhoods(lattice: WeightLattice, frac: float) -> np.ndarray:
    """For each subproblem, the ceil(frac*N) nearest weight vectors by
    Euclidean distance (self included, distance ties broken by lower index),
    never fewer than two."""
    if not 0.0 < frac <= 1.0:
        raise ContractViolation("frac must lie in (0, 1]")
    size = max(2, min(ceil(frac * lattice.n), lattice.n))
    return neighborhoods_by_size(lattice, size)


def neighborhoods_by_size(lattice: WeightLattice, size: int) -> np.ndarray:
    if not 2 <= size <= lattice.n:
        raise ContractViolation(f"neighborhood size {size} outside [2, {lattice.n}]")
    w = lattice.vectors
    # squared distances keep the comparison exact; stable sort breaks ties by index
    d2 = ((w[:, None, :] - w[None, :, :]) ** 2).sum(axis=2)
    order = np.argsort(d2, axis=1, kind="stable")
    return np.ascontiguousarray(order[:, :size].astype(np.int64))


@dataclass
class MoeadState:
    """Mutable run state; the archive matrices are preallocated to the budget."""

    problem: ProblemHandle
    config: MoeadConfig
    lattice: WeightLattice
    mating: np.ndarray
    replacement: np.ndarray
    archive_x: np.ndarray
    archive_f: np.ndarray
    population_index: np.ndarray
    z_min: np.ndarray
    evaluations: int
    generation: int
    rng: np.random.Generator
    seed: int

    def population_objectives(self) -> np.ndarray:
        return self.archive_f[self.population_index]

    def population_decisions(self) -> np.ndarray:
        return self.archive_x[self.population_index]


@dataclass
class RunResult:
    """Outcome of one seeded run."""

    final_population: list[Solution]
    archive: Archive
    config: MoeadConfig
    seed: int
    problem_name: str
    generations: int


def _resolve_problem(problem) -> ProblemHandle:
    if isinstance(problem, ProblemHandle):
        return problem
    return make_problem(problem)


def init_state(problem, config: MoeadConfig, seed: int) -> MoeadState:
    """Allocate state and evaluate the N uniform-random initial solutions."""
    handle = _resolve_problem(problem)
    n = config.population
    if config.budget < n:
        raise ContractViolation(
            f"budget {config.budget} cannot initialize a population of {n}"
        )
    lattice = lattice_for_population(handle.m, n)
    mating = neighborhoods_by_size(lattice, config.mate_size())
    replacement = neighborhoods_by_size(lattice, config.rep_size())
    rng = RandomSource(seed).generator

    arch_x = np.empty((config.budget, handle.d))
    arch_f = np.empty((config.budget, handle.m))
    pop_idx = np.empty(n, dtype=np.int64)
    z_min = np.empty(handle.m)

    pid = getattr(handle, "pid", None)
    if pid is not None:
        _engine.init_population(pid, handle.spec.minus, handle.kpos,
                                handle.lower, handle.upper, arch_x, arch_f,
                                pop_idx, z_min, n, rng)
    else:
        for i in range(n):
            for q in range(handle.d):
                arch_x[i, q] = handle.lower[q] + rng.random() * (
                    handle.upper[q] - handle.lower[q])
            f = np.asarray(handle.evaluate(arch_x[i]), dtype=np.float64)
            if not np.isfinite(f).all():
                raise ContractViolation(
                    f"{handle.name}: evaluation produced a non-finite objective "
                    f"at x={arch_x[i]}")
            arch_f[i] = f
            pop_idx[i] = i
        z_min[:] = arch_f[:n].min(axis=0)

    return MoeadState(handle, config, lattice, mating, replacement, arch_x,
                      arch_f, pop_idx, z_min, n, 0, rng, seed)


def _engine_args(state: MoeadState):
    cfg = state.config
    handle = state.problem
    var = cfg.variation
    w = state.lattice.vectors
    wnorms = np.sqrt((w ** 2).sum(axis=1))
    return (handle.lower, handle.upper, w, wnorms, state.mating,
            state.replacement, SCAL_CODE[cfg.scalarizer.kind],
            float(cfg.scalarizer.theta or 0.0), cfg.eps_ini, cfg.eps_end,
            cfg.eps_norm, cfg.normalize, CX_CODE[var.crossover], var.p_c,
            var.eta_c, MUT_CODE[var.mutation], var.resolved_p_m(handle.d),
            var.eta_m, var.sigma_frac, cfg.budget)


def moead_generation(state: MoeadState, *, freeze_anchors: bool = False) -> MoeadState:
    """Advance the run by one generation (possibly clipped by the budget).

    ``freeze_anchors`` holds z_min, the nadir estimate, and the eps schedule
    fixed at their entry values during the generation, so every replacement is
    a strict improvement under one common comparison frame.
    """
    if state.evaluations >= state.config.budget:
        raise ContractViolation("budget already exhausted")
    handle = state.problem
    pid = getattr(handle, "pid", None)
    (lower, upper, w, wnorms, mate, repl, scal_kind, theta, eps_ini, eps_end,
     eps_norm, do_norm, cx_kind, p_c, eta_c, mut_kind, p_m, eta_m, sigma_frac,
     budget) = _engine_args(state)

    if pid is not None:
        evals, t = _engine.advance(
            pid, handle.spec.minus, handle.kpos, lower, upper, w, wnorms,
            mate, repl, scal_kind, theta, eps_ini, eps_end, eps_norm, do_norm,
            cx_kind, p_c, eta_c, mut_kind, p_m, eta_m, sigma_frac, budget,
            state.archive_x, state.archive_f, state.population_index,
            state.z_min, state.evaluations, state.generation, 1,
            freeze_anchors, state.rng)
        state.evaluations = int(evals)
        state.generation = int(t)
        return state

    # generic-problem path: same jitted sub-kernels, evaluation in Python
    from .operators import _crossover_into, _mutate_into

    n = state.lattice.n
    t_total = budget // n
    state.generation += 1
    t = state.generation
    ts = min(t, t_total)
    if t_total <= 1:
        eps_t = eps_end
    else:
        eps_t = (eps_ini - eps_end) * (t_total - ts) / (t_total - 1.0) + eps_end

    znad = state.archive_f[state.population_index].max(axis=0)
    z_cmp = state.z_min.copy() if freeze_anchors else state.z_min
    child = np.empty(handle.d)
    rng = state.rng
    tm = mate.shape[1]
    for j in range(n):
        if state.evaluations >= budget:
            break
        a = int(rng.integers(0, tm))
        b = int(rng.integers(0, tm - 1))
        if b >= a:
            b += 1
        ia = state.population_index[mate[j, a]]
        ib = state.population_index[mate[j, b]]
        _crossover_into(cx_kind, p_c, eta_c, state.archive_x[ia],
                        state.archive_x[ib], lower, upper, rng, child)
        _mutate_into(mut_kind, p_m, eta_m, sigma_frac, lower, upper, rng, child)
        f = np.asarray(handle.evaluate(child), dtype=np.float64)
        if not np.isfinite(f).all():
            raise ContractViolation(
                f"{handle.name}: evaluation produced a non-finite objective at x={child}")
        ci = state.evaluations
        state.archive_x[ci] = child
        state.archive_f[ci] = f
        state.evaluations += 1
        if not freeze_anchors:
            np.minimum(state.z_min, f, out=state.z_min)
        _engine.replacement_scan(w, wnorms, repl[j], scal_kind, theta, eps_t,
                                 eps_norm, do_norm, state.archive_f,
                                 state.population_index, z_cmp, znad, f, ci,
                                 freeze_anchors)
    return state


def finalize(state: MoeadState) -> RunResult:
    archive = Archive.from_arrays(state.archive_x[: state.evaluations],
                                  state.archive_f[: state.evaluations])
    final = [archive[int(i)] for i in state.population_index]
    return RunResult(final, archive, state.config, state.seed,
                     state.problem.name, state.generation)


def run_moead(problem, config: MoeadConfig, seed: int) -> RunResult:
    """Run until the evaluation budget is exhausted and collect the result."""
    state = init_state(problem, config, seed)
    handle = state.problem
    pid = getattr(handle, "pid", None)
    if pid is not None:
        args = _engine_args(state)
        evals, t = _engine.advance(
            pid, handle.spec.minus, handle.kpos, *args[:20],
            state.archive_x, state.archive_f, state.population_index,
            state.z_min, state.evaluations, state.generation, 2 ** 62, False,
            state.rng)
        state.evaluations = int(evals)
        state.generation = int(t)
    else:
        while state.evaluations < config.budget:
            moead_generation(state)
    return finalize(state)


# --- flat key/value configuration files -----------------------------------

_TRUE = {"true", "1", "yes", "on"}
_FALSE = {"false", "0", "no", "off"}


def save_config(config: MoeadConfig, path) -> None:
    var = config.variation
    p_m = "1/D" if var.p_m is None else repr(var.p_m)
    lines = [
        f"scalarizer = {config.scalarizer.kind}",
    ]
    if config.scalarizer.theta is not None:
        lines.append(f"theta = {config.scalarizer.theta!r}")
    lines += [
        f"eps_ini = {config.eps_ini!r}",
        f"eps_end = {config.eps_end!r}",
    ]
    if config.t_mate_size is not None:
        lines.append(f"t_mate_size = {config.t_mate_size}")
    else:
        lines.append(f"t_mate_frac = {config.t_mate_frac!r}")
    if config.t_rep_size is not None:
        lines.append(f"t_rep_size = {config.t_rep_size}")
    else:
        lines.append(f"t_rep_frac = {config.t_rep_frac!r}")
    lines += [
        f"eps_norm = {config.eps_norm!r}",
        f"normalize = {str(config.normalize).lower()}",
        f"crossover = {var.crossover}",
        f"p_c = {var.p_c!r}",
        f"mutation = {var.mutation}",
        f"p_m = {p_m}",
        f"eta_c = {var.eta_c!r}",
        f"eta_m = {var.eta_m!r}",
        f"sigma_frac = {var.sigma_frac!r}",
        f"population = {config.population}",
        f"budget = {config.budget}",
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_config(path, **overrides) -> MoeadConfig:
    """Parse a flat ``key = value`` configuration file; keyword overrides win."""
    raw: dict[str, str] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ContractViolation(f"{path}:{lineno}: expected 'key = value'")
            key, value = stripped.split("=", 1)
            raw[key.strip().lower()] = value.strip()

    def pop_float(key, default=None):
        if key in raw:
            return float(raw.pop(key))
        return default

    kind = raw.pop("scalarizer", "TCH").upper()
    theta = pop_float("theta")
    if kind not in ("PBI", "IPBI"):
        theta = None
    elif theta is None:
        raise ContractViolation(f"{path}: {kind} requires theta")

    p_m_raw = raw.pop("p_m", None)
    if p_m_raw is None or p_m_raw.replace(" ", "").lower() == "1/d":
        p_m = None
    else:
        p_m = float(p_m_raw)

    def pop_bool(key, default):
        if key not in raw:
            return default
        value = raw.pop(key).lower()
        if value in _TRUE:
            return True
        if value in _FALSE:
            return False
        raise ContractViolation(f"{path}: bad boolean {value!r} for {key}")

    variation = VariationConfig(
        crossover=raw.pop("crossover", "SBX").upper(),
        p_c=pop_float("p_c", 1.0),
        mutation=raw.pop("mutation", "Polynomial").capitalize(),
        p_m=p_m,
        eta_c=pop_float("eta_c", 20.0),
        eta_m=pop_float("eta_m", 20.0),
        sigma_frac=pop_float("sigma_frac", 0.1),
    )
    mate_size = raw.pop("t_mate_size", None)
    rep_size = raw.pop("t_rep_size", None)
    config = MoeadConfig(
        scalarizer=ScalarizerChoice(kind, theta),
        eps_ini=pop_float("eps_ini", 0.0),
        eps_end=pop_float("eps_end", 0.0),
        t_mate_frac=pop_float("t_mate_frac", 0.2),
        t_rep_frac=pop_float("t_rep_frac", 0.2),
        t_mate_size=int(mate_size) if mate_size is not None else None,
        t_rep_size=int(rep_size) if rep_size is not None else None,
        eps_norm=pop_float("eps_norm", 1e-6),
        normalize=pop_bool("normalize", True),
        variation=variation,
        population=int(raw.pop("population", 91)),
        budget=int(raw.pop("budget", 10_000)),
    )
    if raw:
        raise ContractViolation(f"{path}: unknown keys {sorted(raw)}")
    if overrides:
        config = replace(config, **overrides)
    return config
