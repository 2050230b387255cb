import numpy as np
import pytest

from moeadtk import _engine
from moeadtk.core import Archive, ContractViolation, ProblemHandle
from moeadtk.decomposition import ScalarizerChoice, das_dennis, normalize, scalarize
from moeadtk.experiments import standard_variant
from moeadtk.moead import (
    MoeadConfig,
    build_neighborhoods,
    finalize,
    init_state,
    load_config,
    moead_generation,
    neighborhoods_by_size,
    run_moead,
    save_config,
)
from moeadtk.operators import VariationConfig


def small_config(budget=500, **kwargs):
    return MoeadConfig(scalarizer=ScalarizerChoice("TCH"), population=91,
                       budget=budget, **kwargs)


def test_build_neighborhoods_full():
    lattice = das_dennis(3, 4)
    nb = build_neighborhoods(lattice, 1.0)
    assert nb.shape == (lattice.n, lattice.n)
    for row in nb:
        assert sorted(row) == list(range(lattice.n))


def test_build_neighborhoods_five_percent_of_91():
    lattice = das_dennis(3, 12)
    nb = build_neighborhoods(lattice, 0.05)
    assert nb.shape == (91, 5)  # ceil(4.55)
    assert all(nb[j, 0] == j for j in range(91))  # self is nearest


def test_build_neighborhoods_unit_lattice_tie_break():
    # the three unit vectors are pairwise equidistant: ties go to lower index
    lattice = das_dennis(3, 1)
    nb = build_neighborhoods(lattice, 2 / 3)
    assert nb.tolist() == [[0, 1], [1, 0], [2, 0]]


def test_neighborhood_floor_of_two():
    lattice = das_dennis(3, 12)
    nb = build_neighborhoods(lattice, 0.001)
    assert nb.shape[1] == 2
    with pytest.raises(ContractViolation):
        neighborhoods_by_size(lattice, 1)


def test_generation_consumes_population_size_evaluations():
    state = init_state("dtlz2", small_config(budget=1000), seed=1)
    assert state.evaluations == 91
    moead_generation(state)
    assert state.evaluations == 182
    assert state.generation == 1


def test_final_generation_clipped_by_budget():
    state = init_state("dtlz2", small_config(budget=200), seed=1)
    moead_generation(state)
    assert state.evaluations == 182
    moead_generation(state)
    assert state.evaluations == 200  # partial generation is legal
    with pytest.raises(ContractViolation):
        moead_generation(state)


def test_run_budget_below_population_errors():
    with pytest.raises(ContractViolation):
        run_moead("dtlz2", small_config(budget=50), seed=1)


def test_run_archive_length_and_generations():
    result = run_moead("dtlz2", standard_variant("TCH", budget=10_000), seed=3)
    assert len(result.archive) == 10_000
    # 91 init + 108 full generations + one partial of 81
    assert result.generations == 109
    assert 91 + 108 * 91 + 81 == 10_000


def test_same_seed_bit_identical():
    cfg = small_config(budget=800)
    a = run_moead("wfg1", cfg, seed=9)
    b = run_moead("wfg1", cfg, seed=9)
    assert np.array_equal(a.archive.decisions(), b.archive.decisions())
    assert np.array_equal(a.archive.objectives(), b.archive.objectives())
    c = run_moead("wfg1", cfg, seed=10)
    assert not np.array_equal(a.archive.objectives(), c.archive.objectives())


def test_final_population_within_archive():
    result = run_moead("dtlz1", small_config(budget=700), seed=2)
    assert len(result.final_population) == 91
    for s in result.final_population:
        assert result.archive[s.eval_index] is s


def test_z_min_matches_archive_prefix_minimum():
    state = init_state("dtlz2", small_config(budget=600), seed=4)
    for _ in range(5):
        moead_generation(state)
    objs = state.archive_f[: state.evaluations]
    assert np.array_equal(state.z_min, objs.min(axis=0))


def test_tie_keeps_incumbent():
    # a child identical to the incumbent must never replace it
    lattice = das_dennis(3, 12)
    w = lattice.vectors
    wnorms = np.sqrt((w ** 2).sum(axis=1))
    arch_f = np.ones((92, 3))
    pop_idx = np.arange(91, dtype=np.int64)
    z_min = np.zeros(3)
    znad = np.ones(3)
    fchild = np.ones(3)
    arch_f[91] = fchild
    repl = np.arange(91, dtype=np.int64)
    for kind in range(5):
        replaced = _engine.replacement_scan(
            w, wnorms, repl, kind, 5.0, 0.0, 1e-6, True, arch_f, pop_idx,
            z_min, znad, fchild, 91, False)
        assert replaced == 0
        assert np.array_equal(pop_idx, np.arange(91))


def test_replacement_improves_strictly():
    # a dominating child replaces every neighbor under TCH
    lattice = das_dennis(3, 12)
    w = lattice.vectors
    wnorms = np.sqrt((w ** 2).sum(axis=1))
    arch_f = np.ones((92, 3))
    pop_idx = np.arange(91, dtype=np.int64)
    z_min = np.zeros(3)
    znad = np.ones(3)
    fchild = np.full(3, 0.25)
    arch_f[91] = fchild
    repl = np.arange(91, dtype=np.int64)
    replaced = _engine.replacement_scan(
        w, wnorms, repl, 1, 0.0, 0.0, 1e-6, True, arch_f, pop_idx,
        z_min, znad, fchild, 91, False)
    assert replaced == 91
    assert (pop_idx == 91).all()


def _own_weight_values(state, context=None, eps_t=0.0):
    """Scalarized value of each incumbent on its own weight, under a fixed
    (z_min, nadir) comparison context (defaults to the state's current one)."""
    cfg = state.config
    if context is None:
        context = (state.z_min.copy(),
                   state.population_objectives().max(axis=0))
    zmin, znad = context
    out = []
    for j in range(state.lattice.n):
        f = state.archive_f[state.population_index[j]]
        nf = normalize(f, zmin, znad, cfg.eps_norm)
        anchor = normalize(zmin - eps_t, zmin, znad, cfg.eps_norm)
        nznad = normalize(znad, zmin, znad, cfg.eps_norm)
        out.append(scalarize(cfg.scalarizer, nf, state.lattice.vectors[j],
                             z_star=anchor, z_nad=nznad))
    return np.array(out)


@pytest.mark.parametrize("kind,theta", [("TCH", None), ("PBI", 5.0),
                                        ("WS", None), ("IPBI", 0.1)])
def test_frozen_anchor_replacement_monotone(kind, theta):
    cfg = MoeadConfig(scalarizer=ScalarizerChoice(kind, theta),
                      population=91, budget=91 * 5)
    state = init_state("dtlz2", cfg, seed=6)
    for _ in range(4):
        context = (state.z_min.copy(),
                   state.population_objectives().max(axis=0))
        before = _own_weight_values(state, context)
        moead_generation(state, freeze_anchors=True)
        after = _own_weight_values(state, context)
        if kind == "IPBI":
            assert (after >= before - 1e-12).all()
        else:
            assert (after <= before + 1e-12).all()


def test_generic_problem_fallback_path():
    # a handle with a plain-python evaluator runs through the fallback loop
    def evaluate(x):
        return np.array([x[0] ** 2 + x[1] ** 2, (x[0] - 1) ** 2 + x[1] ** 2])

    handle = ProblemHandle("toy-biobjective", 2, 2,
                           np.array([-1.0, -1.0]), np.array([2.0, 2.0]),
                           evaluate)
    cfg = MoeadConfig(scalarizer=ScalarizerChoice("TCH"), population=11,
                      budget=200)
    a = run_moead(handle, cfg, seed=1)
    b = run_moead(handle, cfg, seed=1)
    assert len(a.archive) == 200
    assert np.array_equal(a.archive.objectives(), b.archive.objectives())
    # the search actually improves on random initialization
    first = a.archive.objectives()[:11].min(axis=0)
    final = np.stack([s.objectives for s in a.final_population]).min(axis=0)
    assert (final <= first).all()


def test_nan_objective_aborts():
    def evaluate(x):
        return np.array([np.nan, 1.0])

    handle = ProblemHandle("nanprob", 2, 1, np.zeros(1), np.ones(1), evaluate)
    cfg = MoeadConfig(scalarizer=ScalarizerChoice("TCH"), population=3, budget=10)
    with pytest.raises(ContractViolation, match="non-finite"):
        run_moead(handle, cfg, seed=1)


def test_population_size_must_match_a_lattice():
    with pytest.raises(ContractViolation):
        run_moead("dtlz2", small_config().__class__(
            scalarizer=ScalarizerChoice("TCH"), population=90, budget=500), 1)


def test_config_validation():
    with pytest.raises(ContractViolation):
        MoeadConfig(eps_ini=-0.5)
    with pytest.raises(ContractViolation):
        MoeadConfig(eps_end=0.2)
    with pytest.raises(ContractViolation):
        MoeadConfig(t_mate_frac=0.0)
    with pytest.raises(ContractViolation):
        MoeadConfig(eps_norm=0.0)
    assert MoeadConfig(t_mate_size=20).mate_size() == 20
    assert MoeadConfig(t_rep_frac=0.05).rep_size() == 5


def test_config_file_roundtrip(tmp_path):
    cfg = MoeadConfig(
        scalarizer=ScalarizerChoice("IPBI", 2.5),
        eps_ini=1.0, eps_end=-0.05, t_mate_frac=0.1, t_rep_frac=0.35,
        eps_norm=0.01, normalize=False,
        variation=VariationConfig("WAX", 0.9, "Random", 0.2),
        population=91, budget=3000)
    path = tmp_path / "run.cfg"
    save_config(cfg, path)
    assert load_config(path) == cfg
    # the 1/D mutation-rate sentinel survives the round trip
    std = standard_variant("TCH")
    save_config(std, path)
    loaded = load_config(path)
    assert loaded.variation.p_m is None
    assert loaded == std


def test_config_file_errors(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("scalarizer = PBI\n")
    with pytest.raises(ContractViolation, match="theta"):
        load_config(path)
    path.write_text("scalarizer = TCH\nnot a pair\n")
    with pytest.raises(ContractViolation, match="key = value"):
        load_config(path)
    path.write_text("scalarizer = TCH\nmystery = 3\n")
    with pytest.raises(ContractViolation, match="mystery"):
        load_config(path)


def test_archive_dump_from_run(tmp_path):
    result = run_moead("dtlz2", small_config(budget=300), seed=8)
    path = tmp_path / "arch.txt"
    result.archive.dump(path)
    loaded = Archive.load(path, 12, 3)
    assert np.array_equal(loaded.objectives(), result.archive.objectives())
