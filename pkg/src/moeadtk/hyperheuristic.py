"""53-bit configuration genomes and the offline GA that tunes the search.

Genome layout, in order: scalarizer(3), theta(10), eps_ini(4), eps_end(4),
t_mate(3), t_rep(3), eps_norm(10), crossover(3), p_c(5), mutation(3), p_m(5).
Categorical fields decode as 1 + round((options-1) / (2^n - 1) * value) with
rounding half away from zero; real fields decode as lo + (hi-lo) * value /
(2^n - 1).  Every bit string decodes to a valid configuration.

The tuner is a (mu + mu) GA: tournament parent selection, uniform crossover,
per-bit flips.  A configuration's fitness is the mean hypervolume of its
scored sets over a fixed list of run seeds; scored sets are the final
population (final_population framework) or a distance-selected subset of the
archive's non-dominated solutions (solution_selection framework).  Unless a
fixed frame is supplied, the hypervolume frame is rebuilt each generation from
the non-dominated union of all scored sets cached for the current parent and
offspring configurations, and every fitness (survivors included) is recomputed
under it from the cached sets.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import ContractViolation, RandomSource, nondominated_filter
from .decomposition import ScalarizerChoice
from .indicators import HvReferenceFrame, hypervolume_ratio
from .moead import MoeadConfig, run_moead
from .operators import VariationConfig
from .subset_selection import distance_based_select

GENOME_LENGTH = 53

FRAMEWORKS = ("final_population", "solution_selection")

_EPS_INI_DOMAIN = (0.0, 0.001, 0.005, 0.01, 0.05, 0.1,
                   1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0)
_EPS_END_DOMAIN = (-5.0, -4.0, -3.0, -2.0, -1.0, -0.1, -0.05, -0.01, -0.005,
                   -0.001, 0.0, 0.001, 0.005, 0.01, 0.05, 0.1)
_NEIGHBOR_DOMAIN = (0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40)
_EPS_NORM_DOMAIN = (1e-6, 1e-5, 1e-4, 0.001, 0.01, 0.1,
                    1.0, 5.0, 10.0, 15.0, 20.0, 25.0)
_SCALARIZER_DOMAIN = ("WS", "TCH", "PBI", "IPBI", "MTCH")
_CROSSOVER_DOMAIN = ("SBX", "WAX", "LAX")
_MUTATION_DOMAIN = ("Polynomial", "Gaussian", "Random")

# (name, bits, "cat"/"real", domain or (lo, hi))
GENOME_FIELDS = (
    ("scalarizer", 3, "cat", _SCALARIZER_DOMAIN),
    ("theta", 10, "real", (0.0, 10.0)),
    ("eps_ini", 4, "cat", _EPS_INI_DOMAIN),
    ("eps_end", 4, "cat", _EPS_END_DOMAIN),
    ("t_mate", 3, "cat", _NEIGHBOR_DOMAIN),
    ("t_rep", 3, "cat", _NEIGHBOR_DOMAIN),
    ("eps_norm", 10, "cat", _EPS_NORM_DOMAIN),
    ("crossover", 3, "cat", _CROSSOVER_DOMAIN),
    ("p_c", 5, "real", (0.0, 1.0)),
    ("mutation", 3, "cat", _MUTATION_DOMAIN),
    ("p_m", 5, "real", (0.0, 1.0)),
)

assert sum(f[1] for f in GENOME_FIELDS) == GENOME_LENGTH


@dataclass(frozen=True)
class ConfigGenome:
    """A 53-character bit string; the codec below is total over all of them."""

    bits: str

    def __post_init__(self):
        b = self.bits
        if len(b) != GENOME_LENGTH or b.count("0") + b.count("1") != GENOME_LENGTH:
            raise ContractViolation(f"genome must be {GENOME_LENGTH} bits of 0/1")


def _categorical_index(value: int, width: int, option_count: int) -> int:
    scaled = (option_count - 1) / (2 ** width - 1) * value
    return 1 + int(scaled + 0.5)  # half away from zero; scaled is never negative


def decode_categorical(bits: str, option_count: int) -> int:
    """1-based option index: 1 + round((options-1)/(2^n - 1) * value), with
    half-away-from-zero rounding."""
    if option_count < 1:
        raise ContractViolation("option_count must be >= 1")
    if option_count == 1 or len(bits) == 0:
        return 1
    return _categorical_index(int(bits, 2), len(bits), option_count)


def decode_real(bits: str, lo: float, hi: float) -> float:
    """lo + (hi - lo) * value / (2^n - 1); endpoints map exactly to lo and hi."""
    if not lo < hi:
        raise ContractViolation("need lo < hi")
    return lo + (hi - lo) * int(bits, 2) / (2 ** len(bits) - 1)


def _split_fields(bits: str) -> dict[str, str]:
    out = {}
    pos = 0
    for name, width, _, _ in GENOME_FIELDS:
        out[name] = bits[pos : pos + width]
        pos += width
    return out


def decode_genome(genome: ConfigGenome | str, population: int = 91,
                  budget: int = 10_000) -> MoeadConfig:
    """Decode the 53-bit string into a full configuration.

    theta is decoded from its own field but only attached when the scalarizer
    is PBI or IPBI.  The body is straight-line bit arithmetic (field layout:
    3+10+4+4+3+3+10+3+5+3+5) because campaigns decode genomes by the million.
    """
    if isinstance(genome, ConfigGenome):
        bits = genome.bits
    else:
        ConfigGenome(genome)  # validate raw strings
        bits = genome
    v = int(bits, 2)
    kind = _SCALARIZER_DOMAIN[int(4 / 7 * (v >> 50) + 0.5)]
    theta = 10.0 * ((v >> 40) & 0x3FF) / 1023.0
    scalarizer = ScalarizerChoice(kind, theta if kind in ("PBI", "IPBI") else None)
    variation = VariationConfig(
        crossover=_CROSSOVER_DOMAIN[int(2 / 7 * ((v >> 13) & 0x7) + 0.5)],
        p_c=((v >> 8) & 0x1F) / 31.0,
        mutation=_MUTATION_DOMAIN[int(2 / 7 * ((v >> 5) & 0x7) + 0.5)],
        p_m=(v & 0x1F) / 31.0,
    )
    return MoeadConfig(
        scalarizer=scalarizer,
        eps_ini=_EPS_INI_DOMAIN[(v >> 36) & 0xF],
        eps_end=_EPS_END_DOMAIN[(v >> 32) & 0xF],
        t_mate_frac=_NEIGHBOR_DOMAIN[(v >> 29) & 0x7],
        t_rep_frac=_NEIGHBOR_DOMAIN[(v >> 26) & 0x7],
        eps_norm=_EPS_NORM_DOMAIN[int(11 / 1023 * ((v >> 16) & 0x3FF) + 0.5)],
        variation=variation,
        population=population,
        budget=budget,
    )


def _encode_categorical(index: int, width: int, option_count: int) -> str:
    for value in range(2 ** width):
        bits = format(value, f"0{width}b")
        if decode_categorical(bits, option_count) == index:
            return bits
    raise ContractViolation("option index not reachable")  # codec is surjective


def _encode_real(target: float, width: int, lo: float, hi: float) -> str:
    steps = 2 ** width - 1
    value = int(round((target - lo) / (hi - lo) * steps))
    return format(min(max(value, 0), steps), f"0{width}b")


def encode_config(config: MoeadConfig) -> ConfigGenome:
    """Nearest genome for a configuration whose fields lie in the tuning
    domains (categorical fields must match exactly)."""
    def cat_bits(value, width, domain):
        if value not in domain:
            raise ContractViolation(f"{value!r} is outside the tuning domain")
        return _encode_categorical(domain.index(value) + 1, width, len(domain))

    var = config.variation
    parts = [
        cat_bits(config.scalarizer.kind, 3, _SCALARIZER_DOMAIN),
        _encode_real(config.scalarizer.theta or 0.0, 10, 0.0, 10.0),
        cat_bits(config.eps_ini, 4, _EPS_INI_DOMAIN),
        cat_bits(config.eps_end, 4, _EPS_END_DOMAIN),
        cat_bits(config.t_mate_frac, 3, _NEIGHBOR_DOMAIN),
        cat_bits(config.t_rep_frac, 3, _NEIGHBOR_DOMAIN),
        cat_bits(config.eps_norm, 10, _EPS_NORM_DOMAIN),
        cat_bits(var.crossover, 3, _CROSSOVER_DOMAIN),
        _encode_real(var.p_c, 5, 0.0, 1.0),
        cat_bits(var.mutation, 3, _MUTATION_DOMAIN),
        _encode_real(var.p_m if var.p_m is not None else 0.0, 5, 0.0, 1.0),
    ]
    return ConfigGenome("".join(parts))


def random_genome(rng: np.random.Generator) -> ConfigGenome:
    return ConfigGenome("".join("1" if b else "0"
                                for b in rng.integers(0, 2, GENOME_LENGTH)))


def describe_config(config: MoeadConfig) -> dict[str, str]:
    """Human-readable field table in the tuned-configuration column layout."""
    var = config.variation
    theta = config.scalarizer.theta
    return {
        "g": config.scalarizer.kind,
        "theta": "-" if theta is None else f"{theta:.4f}",
        "eps_ini": f"{config.eps_ini:g}",
        "eps_end": f"{config.eps_end:g}",
        "eps_norm": f"{config.eps_norm:g}",
        "t_mate": f"{config.t_mate_frac:.0%}",
        "t_rep": f"{config.t_rep_frac:.0%}",
        "crossover": var.crossover,
        "p_c": f"{var.p_c:.4f}",
        "mutation": var.mutation,
        "p_m": f"{var.p_m:.4f}" if var.p_m is not None else "1/D",
    }


@dataclass(frozen=True)
class TunerConfig:
    """GA settings; the defaults are the full-scale campaign values."""

    mu: int = 100
    generations: int = 100
    tournament_size: int = 3
    crossover_prob: float = 1.0
    bitflip_prob: float = 1.0 / GENOME_LENGTH
    runs_per_fitness: int = 5
    framework: str = "solution_selection"
    inner_budget: int = 10_000
    inner_population: int = 91
    selection_size: int = 91

    def __post_init__(self):
        if self.framework not in FRAMEWORKS:
            raise ContractViolation(f"unknown framework {self.framework!r}")
        for name in ("mu", "generations", "tournament_size", "runs_per_fitness",
                     "inner_budget", "inner_population", "selection_size"):
            if getattr(self, name) < 1:
                raise ContractViolation(f"{name} must be positive")


def evaluate_config(config: MoeadConfig, problem, framework: str,
                    frame: HvReferenceFrame, runs: int = 5,
                    seeds=None) -> tuple[float, list[np.ndarray]]:
    """Run the configuration ``runs`` times and score it under ``frame``.

    Returns (mean hypervolume, per-run scored sets).  The scored sets alone
    determine the fitness, so a caller can re-score them under a different
    frame without re-running.
    """
    if framework not in FRAMEWORKS:
        raise ContractViolation(f"unknown framework {framework!r}")
    if seeds is None:
        seeds = list(range(runs))
    sets = [scored_set(run_moead(problem, config, seed), framework, seed,
                       config.population)
            for seed in seeds]
    return fitness_under(sets, frame), sets


def scored_set(result, framework: str, seed: int, selection_size: int) -> np.ndarray:
    """The objective set a run is judged by under the given framework."""
    if framework == "final_population":
        return np.stack([s.objectives for s in result.final_population])
    arch = result.archive.objectives()
    front = arch[nondominated_filter(arch)]
    rng = RandomSource(seed).spawn(1)  # independent of the run's own stream
    picked = distance_based_select(front, selection_size, rng)
    return front[picked]


def fitness_under(sets: list[np.ndarray], frame: HvReferenceFrame) -> float:
    return float(np.mean([hypervolume_ratio(s, frame) for s in sets]))


def _rebuild_frame(all_sets: list[np.ndarray], r_scalar: float = 1.1) -> HvReferenceFrame:
    union = np.concatenate(all_sets, axis=0)
    front = union[nondominated_filter(union)]
    ideal = front.min(axis=0)
    nadir = front.max(axis=0)
    if (ideal == nadir).any():
        raise ContractViolation("tuning frame degenerate: ideal equals nadir")
    return HvReferenceFrame(ideal, nadir, r_scalar)


@dataclass
class GenerationLog:
    generation: int
    best_fitness: float
    mean_fitness: float
    frame_ideal: np.ndarray
    frame_nadir: np.ndarray
    evaluated_configs: int


@dataclass
class TuneResult:
    best_genome: ConfigGenome
    best_config: MoeadConfig
    best_fitness: float
    log: list[GenerationLog] = field(default_factory=list)


def tune_moead(problem, tuner: TunerConfig, master_seed: int,
               frame: HvReferenceFrame | None = None,
               progress=None) -> TuneResult:
    """Offline GA over configuration genomes.

    Generation 1 is the random initial population; each later generation adds
    ``mu`` offspring and keeps the best ``mu`` of the combined pool ((mu + mu)
    truncation, stable toward incumbents on ties).  Passing ``frame`` fixes
    the scoring frame (test mode) instead of the per-generation rebuild.
    """
    source = RandomSource(master_seed)
    ga_rng = source.spawn(0)
    run_seeds = [source.spawn_seed(1, i) for i in range(tuner.runs_per_fitness)]

    cache: dict[str, list[np.ndarray]] = {}

    def sets_for(genome: ConfigGenome) -> list[np.ndarray]:
        if genome.bits not in cache:
            config = decode_genome(genome, tuner.inner_population, tuner.inner_budget)
            cache[genome.bits] = [
                scored_set(run_moead(problem, config, seed), tuner.framework,
                           seed, tuner.selection_size)
                for seed in run_seeds
            ]
        return cache[genome.bits]

    def refreshed_frame(pool: list[ConfigGenome]) -> HvReferenceFrame:
        if frame is not None:
            return frame
        all_sets = [s for genome in pool for s in cache[genome.bits]]
        return _rebuild_frame(all_sets)

    def tournament(fitness: list[float]) -> int:
        best = -1
        best_fit = -np.inf
        for _ in range(tuner.tournament_size):
            idx = int(ga_rng.integers(0, len(fitness)))
            if fitness[idx] > best_fit:
                best_fit = fitness[idx]
                best = idx
        return best

    def make_offspring(parents: list[ConfigGenome], fitness: list[float]) -> ConfigGenome:
        pa = parents[tournament(fitness)]
        pb = parents[tournament(fitness)]
        if ga_rng.random() < tuner.crossover_prob:
            take_a = ga_rng.random(GENOME_LENGTH) < 0.5
            bits = [a if t else b for a, b, t in zip(pa.bits, pb.bits, take_a)]
        else:
            bits = list(pa.bits)
        flips = ga_rng.random(GENOME_LENGTH) < tuner.bitflip_prob
        bits = [("1" if b == "0" else "0") if f else b for b, f in zip(bits, flips)]
        return ConfigGenome("".join(bits))

    population = [random_genome(ga_rng) for _ in range(tuner.mu)]
    for genome in population:
        sets_for(genome)
    current_frame = refreshed_frame(population)
    fitness = [fitness_under(sets_for(g), current_frame) for g in population]

    log: list[GenerationLog] = []

    def record(gen: int):
        log.append(GenerationLog(gen, max(fitness), float(np.mean(fitness)),
                                 current_frame.ideal.copy(),
                                 current_frame.nadir.copy(), len(cache)))
        if progress is not None:
            progress(log[-1])

    record(1)
    for gen in range(2, tuner.generations + 1):
        offspring = [make_offspring(population, fitness) for _ in range(tuner.mu)]
        for genome in offspring:
            sets_for(genome)
        pool = population + offspring
        current_frame = refreshed_frame(pool)
        pool_fitness = [fitness_under(sets_for(g), current_frame) for g in pool]
        order = sorted(range(len(pool)), key=lambda i: -pool_fitness[i])
        population = [pool[i] for i in order[: tuner.mu]]
        fitness = [pool_fitness[i] for i in order[: tuner.mu]]
        record(gen)

    best_idx = int(np.argmax(fitness))
    best = population[best_idx]
    return TuneResult(best, decode_genome(best, tuner.inner_population,
                                          tuner.inner_budget),
                      fitness[best_idx], log)
