import numpy as np
import pytest

from moeadtk.core import ContractViolation
from moeadtk.experiments import true_front_frame
from moeadtk.hyperheuristic import (
    GENOME_FIELDS,
    GENOME_LENGTH,
    ConfigGenome,
    TunerConfig,
    decode_categorical,
    decode_genome,
    decode_real,
    describe_config,
    encode_config,
    evaluate_config,
    fitness_under,
    random_genome,
    scored_set,
    tune_moead,
    _split_fields,
)
from moeadtk.moead import MoeadConfig, run_moead
from moeadtk.decomposition import ScalarizerChoice
from moeadtk.operators import VariationConfig
from moeadtk.presets import tuned_config, tuned_problems

DOMAINS = {name: domain for name, _, kind, domain in GENOME_FIELDS if kind == "cat"}


def test_decode_categorical_examples():
    assert decode_categorical("000", 5) == 1
    assert decode_categorical("111", 5) == 5
    assert decode_categorical("100", 5) == 3


def test_decode_categorical_surjective_and_monotone():
    for count in (2, 3, 5, 8, 12, 16):
        for width in (3, 4, 10):
            if count > 2 ** width:
                continue
            indices = [decode_categorical(format(v, f"0{width}b"), count)
                       for v in range(2 ** width)]
            assert set(indices) == set(range(1, count + 1))
            assert indices == sorted(indices)


def test_decode_real_endpoints_exact():
    assert decode_real("1" * 10, 0.0, 10.0) == 10.0
    assert decode_real("0" * 10, 0.0, 10.0) == 0.0
    assert decode_real("11111", 0.0, 1.0) == 1.0
    assert decode_real("1000000000", 0.0, 10.0) == pytest.approx(10 * 512 / 1023)


def test_decode_genome_boundary_strings():
    cfg = decode_genome("0" * GENOME_LENGTH)
    assert cfg.scalarizer.kind == "WS" and cfg.scalarizer.theta is None
    assert cfg.eps_ini == 0.0 and cfg.eps_end == -5.0
    assert cfg.t_mate_frac == 0.05 and cfg.t_rep_frac == 0.05
    assert cfg.eps_norm == 1e-6
    assert cfg.variation.crossover == "SBX" and cfg.variation.p_c == 0.0
    assert cfg.variation.mutation == "Polynomial" and cfg.variation.p_m == 0.0

    cfg = decode_genome("1" * GENOME_LENGTH)
    assert cfg.scalarizer.kind == "MTCH" and cfg.scalarizer.theta is None
    assert cfg.eps_ini == 10.0 and cfg.eps_end == 0.1
    assert cfg.t_mate_frac == 0.40 and cfg.t_rep_frac == 0.40
    assert cfg.eps_norm == 25.0
    assert cfg.variation.crossover == "LAX" and cfg.variation.p_c == 1.0
    assert cfg.variation.mutation == "Random" and cfg.variation.p_m == 1.0


def test_decode_genome_theta_attachment():
    bits = list("0" * GENOME_LENGTH)
    bits[0:3] = "100"  # PBI
    bits[3:13] = "1000000000"
    cfg = decode_genome("".join(bits))
    assert cfg.scalarizer.kind == "PBI"
    assert cfg.scalarizer.theta == pytest.approx(10 * 512 / 1023)


def test_decode_matches_field_ops(rng):
    # the packed fast path must agree with the documented per-field codec
    for _ in range(400):
        genome = random_genome(rng)
        cfg = decode_genome(genome)
        fields = _split_fields(genome.bits)
        view = {
            "scalarizer": cfg.scalarizer.kind,
            "theta": cfg.scalarizer.theta if cfg.scalarizer.theta is not None
            else decode_real(fields["theta"], 0.0, 10.0),
            "eps_ini": cfg.eps_ini,
            "eps_end": cfg.eps_end,
            "t_mate": cfg.t_mate_frac,
            "t_rep": cfg.t_rep_frac,
            "eps_norm": cfg.eps_norm,
            "crossover": cfg.variation.crossover,
            "p_c": cfg.variation.p_c,
            "mutation": cfg.variation.mutation,
            "p_m": cfg.variation.p_m,
        }
        for name, width, kind, domain in GENOME_FIELDS:
            if kind == "cat":
                expected = domain[decode_categorical(fields[name], len(domain)) - 1]
            else:
                expected = decode_real(fields[name], *domain)
            assert view[name] == expected, name


def test_codec_totality_fuzz(rng):
    for _ in range(5_000):
        cfg = decode_genome(random_genome(rng))
        assert cfg.eps_ini in DOMAINS["eps_ini"]
        assert cfg.eps_end in DOMAINS["eps_end"]
        assert cfg.eps_norm in DOMAINS["eps_norm"]
        assert cfg.t_mate_frac in DOMAINS["t_mate"]
        assert cfg.t_rep_frac in DOMAINS["t_rep"]
        assert 0.0 <= cfg.variation.p_c <= 1.0
        assert 0.0 <= cfg.variation.p_m <= 1.0


def test_genome_validation():
    with pytest.raises(ContractViolation):
        ConfigGenome("01")
    with pytest.raises(ContractViolation):
        ConfigGenome("2" * GENOME_LENGTH)


def test_every_tuned_row_is_representable():
    for framework in ("fp", "ss"):
        for problem in tuned_problems(framework):
            cfg = tuned_config(problem, framework)
            back = decode_genome(encode_config(cfg))
            assert back.scalarizer.kind == cfg.scalarizer.kind
            if cfg.scalarizer.theta is not None:
                assert back.scalarizer.theta == pytest.approx(
                    cfg.scalarizer.theta, abs=5.1e-5)
            for field in ("eps_ini", "eps_end", "eps_norm",
                          "t_mate_frac", "t_rep_frac"):
                assert getattr(back, field) == getattr(cfg, field)
            assert back.variation.crossover == cfg.variation.crossover
            assert back.variation.mutation == cfg.variation.mutation
            assert back.variation.p_c == pytest.approx(cfg.variation.p_c, abs=5.1e-5)
            assert back.variation.p_m == pytest.approx(cfg.variation.p_m, abs=5.1e-5)


def test_describe_config_layout():
    desc = describe_config(tuned_config("wfg9", "ss"))
    assert list(desc) == ["g", "theta", "eps_ini", "eps_end", "eps_norm",
                          "t_mate", "t_rep", "crossover", "p_c", "mutation", "p_m"]
    assert desc["g"] == "PBI" and desc["t_rep"] == "5%"


@pytest.fixture(scope="module")
def dtlz2_frame():
    return true_front_frame("dtlz2")[0]


def test_evaluate_config_deterministic(dtlz2_frame):
    cfg = decode_genome(random_genome(np.random.default_rng(0)), budget=500)
    f1, sets1 = evaluate_config(cfg, "dtlz2", "solution_selection", dtlz2_frame, runs=2)
    f2, sets2 = evaluate_config(cfg, "dtlz2", "solution_selection", dtlz2_frame, runs=2)
    assert f1 == f2
    assert all(np.array_equal(a, b) for a, b in zip(sets1, sets2))


def test_evaluate_config_frozen_variation_scores_initial_points(dtlz2_frame):
    frozen = MoeadConfig(scalarizer=ScalarizerChoice("TCH"),
                         variation=VariationConfig("SBX", 0.0, "Polynomial", 0.0),
                         population=91, budget=400)
    fitness, sets = evaluate_config(frozen, "dtlz2", "solution_selection",
                                    dtlz2_frame, runs=2)
    expected = []
    for seed in range(2):
        result = run_moead("dtlz2", frozen, seed)
        initial = result.archive.objectives()[:91]
        # no new points are ever examined
        rows = {tuple(r) for r in initial}
        assert all(tuple(r) in rows for r in result.archive.objectives())
        expected.append(fitness_under([initial], dtlz2_frame))
    assert fitness == pytest.approx(np.mean(expected), abs=1e-12)


def test_scored_set_shapes(dtlz2_frame):
    cfg = MoeadConfig(scalarizer=ScalarizerChoice("TCH"), population=91, budget=400)
    result = run_moead("dtlz2", cfg, 1)
    fp = scored_set(result, "final_population", 1, 91)
    assert fp.shape == (91, 3)
    ss = scored_set(result, "solution_selection", 1, 91)
    assert ss.shape[0] <= 91 and ss.shape[1] == 3


def test_tuner_config_validation():
    with pytest.raises(ContractViolation):
        TunerConfig(framework="both")
    with pytest.raises(ContractViolation):
        TunerConfig(mu=0)


def test_fixed_frame_elitism_small(dtlz2_frame):
    tuner = TunerConfig(mu=4, generations=4, runs_per_fitness=1,
                        inner_budget=300, framework="final_population")
    result = tune_moead("dtlz2", tuner, master_seed=5, frame=dtlz2_frame)
    bests = [entry.best_fitness for entry in result.log]
    assert len(bests) == 4
    assert all(b2 >= b1 for b1, b2 in zip(bests, bests[1:]))
    assert result.best_fitness == bests[-1]


def test_tune_deterministic(dtlz2_frame):
    tuner = TunerConfig(mu=3, generations=3, runs_per_fitness=1, inner_budget=300)
    a = tune_moead("dtlz2", tuner, master_seed=9)
    b = tune_moead("dtlz2", tuner, master_seed=9)
    assert a.best_genome == b.best_genome
    assert a.best_fitness == b.best_fitness
    assert [e.best_fitness for e in a.log] == [e.best_fitness for e in b.log]


def test_tune_dynamic_frame_logs(dtlz2_frame):
    tuner = TunerConfig(mu=3, generations=2, runs_per_fitness=1, inner_budget=300)
    result = tune_moead("dtlz2", tuner, master_seed=1)
    assert len(result.log) == 2
    for entry in result.log:
        assert entry.frame_ideal.shape == (3,)
        assert (entry.frame_nadir > entry.frame_ideal).all()
    assert result.best_config.population == 91
