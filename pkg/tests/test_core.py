import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moeadtk.core import (
    Archive,
    ContractViolation,
    ProblemHandle,
    RandomSource,
    Solution,
    dominates,
    nondominated_filter,
)
from conftest import brute_force_nondominated

finite_floats = st.floats(-1e6, 1e6, allow_nan=False)
vectors = st.lists(finite_floats, min_size=2, max_size=5)


def test_dominates_examples():
    assert dominates((1, 2), (2, 3))
    assert not dominates((1, 2), (1, 2))
    assert not dominates((1, 3), (3, 1))
    assert not dominates((3, 1), (1, 3))
    assert dominates((1, 2), (1, 3))


def test_dominates_length_mismatch():
    with pytest.raises(ContractViolation):
        dominates((1, 2), (1, 2, 3))


@given(vectors)
def test_dominance_irreflexive(v):
    assert not dominates(v, v)


@given(st.tuples(vectors, vectors))
def test_dominance_antisymmetric(pair):
    a, b = pair
    if len(a) != len(b):
        return
    if dominates(a, b):
        assert not dominates(b, a)


@given(st.integers(0, 10_000))
def test_dominance_transitive_on_sampled_triples(seed):
    gen = np.random.default_rng(seed)
    a, b, c = gen.integers(0, 4, (3, 3)).astype(float)
    if dominates(a, b) and dominates(b, c):
        assert dominates(a, c)


def test_nondominated_filter_examples():
    assert nondominated_filter([(1, 2), (2, 1), (2, 2)]) == [0, 1]
    assert nondominated_filter([(0, 0)]) == [0]
    assert nondominated_filter([(1, 1), (1, 1)]) == [0, 1]
    assert nondominated_filter([]) == []


def test_nondominated_filter_order_preserved(rng):
    pts = rng.random((50, 3))
    keep = nondominated_filter(pts)
    assert keep == sorted(keep)


@pytest.mark.parametrize("n", [5, 40, 200])
def test_nondominated_filter_matches_brute_force(n, rng):
    for m in (2, 3, 4):
        # integer grids force plenty of duplicates and ties
        pts = rng.integers(0, 5, (n, m)).astype(float)
        assert nondominated_filter(pts) == brute_force_nondominated(pts)
        pts = rng.random((n, m))
        assert nondominated_filter(pts) == brute_force_nondominated(pts)


def test_archive_record_growth():
    archive = Archive()
    s = Solution(np.zeros(2), np.array([1.0, 2.0]), 0)
    archive.record(s)
    assert len(archive) == 1
    # dominated solutions are stored too: the archive never filters
    for i in range(1, 6):
        archive.record(Solution(np.zeros(2), np.array([0.5, 0.5]), i))
    archive.record(Solution(np.zeros(2), np.array([9.0, 9.0]), 6))
    assert len(archive) == 7
    assert archive[6].objectives[0] == 9.0


def test_archive_dump_reload_bit_faithful(tmp_path, rng):
    archive = Archive()
    for i in range(20):
        archive.record(Solution(rng.random(4) * 1e3, rng.random(3) / 1e3, i))
    path = tmp_path / "archive.txt"
    archive.dump(path)
    loaded = Archive.load(path, 4, 3)
    assert np.array_equal(loaded.decisions(), archive.decisions())
    assert np.array_equal(loaded.objectives(), archive.objectives())
    assert [s.eval_index for s in loaded] == list(range(20))


def test_archive_load_rejects_bad_arity(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("0\t1.0\t2.0\n")
    with pytest.raises(ContractViolation, match="columns"):
        Archive.load(path, 2, 2)


def test_problem_handle_validates_bounds():
    handle = ProblemHandle("toy", 2, 2, np.zeros(2), np.ones(2),
                           lambda x: np.array([x[0], x[1]]))
    handle.check_decision([0.5, 0.5])
    with pytest.raises(ContractViolation):
        handle.check_decision([1.5, 0.5])
    with pytest.raises(ContractViolation):
        handle.check_decision([0.5])
    with pytest.raises(ContractViolation):
        ProblemHandle("bad", 2, 2, np.ones(2), np.ones(2), lambda x: x)


def test_random_source_repeatability():
    a = RandomSource(42).generator.random(10)
    b = RandomSource(42).generator.random(10)
    assert np.array_equal(a, b)


def test_random_source_substreams_independent():
    src = RandomSource(42)
    s1 = src.spawn(0).random(5)
    s2 = src.spawn(1).random(5)
    assert not np.array_equal(s1, s2)
    assert np.array_equal(s1, RandomSource(42).spawn(0).random(5))
    assert RandomSource(7).spawn_seed(1, 3) == RandomSource(7).spawn_seed(1, 3)
    assert RandomSource(7).spawn_seed(1, 3) != RandomSource(7).spawn_seed(1, 4)


def test_solution_rejects_negative_index():
    with pytest.raises(ContractViolation):
        Solution(np.zeros(1), np.zeros(1), -1)
