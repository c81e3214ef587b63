import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coopscenario.core import (
    CorePolytope,
    apriori_complexity,
    build_core,
    coalition_minima,
    compression_set,
    is_empty,
    membership,
)
from coopscenario.errors import EmptyCoreError, PreconditionError
from coopscenario.game import GameDefinition, ScenarioGame, incidence_matrix, sample_scenarios, worst_case_values

from .conftest import BENCH_WITNESS, pairwise_game, random_three_agent_game
from .oracles import core_vertices


def random_members(core, rng, count):
    """Random convex combinations of the core's vertices (oracle-enumerated)."""
    verts = core_vertices(core.n, core.grand_value, core.lower_bounds, core.nonneg)
    w = rng.dirichlet(np.ones(len(verts)), size=count)
    return w @ verts


def test_zero_noise_rhs_is_nominal(bench):
    core = build_core(sample_scenarios(bench, 3, seed=0))
    np.testing.assert_array_equal(core.rhs, bench.nominal_vector)


def test_huge_relaxation_contains_every_efficient_allocation(bench):
    core = build_core(sample_scenarios(bench, 1, seed=0), zeta=1e6, nonneg=False)
    rng = np.random.default_rng(0)
    for _ in range(200):
        x = rng.normal(scale=50, size=4)
        x += (17.3 - x.sum()) / 4
        assert membership(core, x, tol=1e-7)


def test_relaxation_shifts_every_bound(bench_uniform):
    sg = sample_scenarios(bench_uniform, 50, seed=1)
    plain, relaxed = build_core(sg), build_core(sg, zeta=0.5)
    np.testing.assert_array_equal(relaxed.lower_bounds, plain.rhs - 0.5)


def test_negative_zeta_rejected(bench):
    with pytest.raises(PreconditionError):
        build_core(sample_scenarios(bench, 1, seed=0), zeta=-0.1)


def test_benchmark_core_nonempty(bench):
    core = build_core(sample_scenarios(bench, 1, seed=0))
    empty, witness = is_empty(core)
    assert not empty
    assert membership(core, witness)
    assert membership(core, BENCH_WITNESS)


def test_benchmark_membership_examples(bench):
    core = build_core(sample_scenarios(bench, 1, seed=0))
    # {2,3} gets 0 < 6.5
    assert not membership(core, [17.3, 0, 0, 0])
    assert not membership(core, BENCH_WITNESS + 0.01)


def test_pairwise_game_core_empty_until_two_thirds():
    sg = sample_scenarios(pairwise_game(2.0), 1, seed=0)
    assert is_empty(build_core(sg))[0]
    empty, witness = is_empty(build_core(sg, zeta=2 / 3))
    assert not empty
    np.testing.assert_allclose(witness, [2 / 3] * 3, atol=1e-9)
    assert is_empty(build_core(sg, zeta=2 / 3 - 1e-6))[0]


def test_membership_dimension_checked(bench):
    core = build_core(sample_scenarios(bench, 1, seed=0))
    with pytest.raises(ValueError):
        membership(core, [1.0, 2.0])


def test_apriori_complexity():
    assert [apriori_complexity(n) for n in (2, 3, 4)] == [2, 6, 14]


def test_compression_single_sample(bench_uniform):
    res = compression_set(sample_scenarios(bench_uniform, 1, seed=4))
    assert set(res.indices) <= {0}
    assert res.cardinality <= 1


def test_compression_duplicate_samples(bench_uniform):
    col = sample_scenarios(bench_uniform, 1, seed=2).values
    sg = ScenarioGame(4, np.repeat(col, 25, axis=1), 17.3)
    res = compression_set(sg)
    assert res.indices == (0,)


def test_compression_records_attaining_indices(bench_uniform):
    sg = sample_scenarios(bench_uniform, 300, seed=9)
    res = compression_set(sg)
    wc = worst_case_values(sg)
    assert [r.attaining for r in res.records] == wc.attaining.tolist()
    assert set(res.indices) == {r.attaining for r in res.records if r.feasible}


@pytest.mark.parametrize("K", [200, 500, 1000, 2000])
def test_compression_at_most_four_on_benchmark(bench_uniform, K):
    for seed in range(3):
        assert compression_set(sample_scenarios(bench_uniform, K, seed)).cardinality <= 4


def test_compression_on_empty_core_raises():
    sg = sample_scenarios(pairwise_game(2.0), 1, seed=0)
    with pytest.raises(EmptyCoreError, match="relaxed"):
        compression_set(sg)


def test_lemma_bound_on_random_games():
    rng = np.random.default_rng(8)
    for trial in range(20):
        game = random_three_agent_game(rng)
        K = int(rng.integers(1, 40))
        sg = sample_scenarios(game, K, seed=trial)
        if is_empty(build_core(sg))[0]:
            continue
        res = compression_set(sg)
        assert res.cardinality <= min(K, 6)


def test_compressed_core_is_the_same_polytope(bench_uniform):
    """Rebuilding from the compression indices keeps every touching facet, hence the set."""
    rng = np.random.default_rng(1)
    sg = sample_scenarios(bench_uniform, 400, seed=6)
    res = compression_set(sg)
    full, small = build_core(sg), build_core(sg.select(res.indices))
    touching = np.array([r.feasible for r in res.records])
    np.testing.assert_array_equal(small.rhs[touching], full.rhs[touching])
    np.testing.assert_allclose(coalition_minima(small), coalition_minima(full), atol=1e-9)
    for _ in range(1000):
        x = rng.uniform(0, 7, 4)
        x *= 17.3 / x.sum()
        assert membership(small, x) == membership(full, x)
    for x in random_members(full, rng, 200):
        assert membership(small, x, tol=1e-8)


def test_minima_three_agent_example():
    game = GameDefinition.from_mapping(3, 2.0, {1: 0, 2: 0, 4: 0, 3: 1, 5: 1, 6: 1})
    core = build_core(sample_scenarios(game, 1, seed=0))
    m = coalition_minima(core)
    assert m[0] == pytest.approx(0.0, abs=1e-12)
    # each pair: min x_i + x_j = 2 - max x_k = 1
    np.testing.assert_allclose(m[3:], [1.0, 1.0, 1.0], atol=1e-12)


def test_minima_match_vertex_enumeration():
    rng = np.random.default_rng(21)
    for trial in range(20):
        game = random_three_agent_game(rng)
        sg = sample_scenarios(game, 5, seed=trial)
        core = build_core(sg)
        if is_empty(core)[0]:
            continue
        verts = core_vertices(3, core.grand_value, core.lower_bounds)
        ref = (incidence_matrix(3) @ verts.T).min(axis=1)
        np.testing.assert_allclose(coalition_minima(core), ref, atol=1e-8)
        assert np.all(coalition_minima(core) >= core.lower_bounds)


def test_minima_of_single_point_core():
    # x(S) >= 1 for singletons and >= 2 for pairs with grand value 3 pins x = (1, 1, 1)
    core = CorePolytope(3, 3.0, [1, 1, 1, 2, 2, 2])
    m = coalition_minima(core)
    np.testing.assert_allclose(m, incidence_matrix(3) @ np.ones(3), atol=1e-9)


def test_minima_on_empty_core_raise():
    core = build_core(sample_scenarios(pairwise_game(2.0), 1, seed=0))
    with pytest.raises(EmptyCoreError):
        coalition_minima(core)


def test_minima_bounded_without_nonnegativity(bench_uniform):
    core = build_core(sample_scenarios(bench_uniform, 100, seed=0), nonneg=False)
    m = coalition_minima(core)
    assert np.all(np.isfinite(m)) and np.all(m >= core.lower_bounds)


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 2), st.floats(0, 2), st.integers(0, 10_000))
def test_zeta_nesting(z1, z2, seed):
    z1, z2 = sorted((z1, z2))
    rng = np.random.default_rng(seed)
    game = random_three_agent_game(rng)
    sg = sample_scenarios(game, 10, seed)
    small = build_core(sg, z1)
    if is_empty(small)[0]:
        return
    big = build_core(sg, z2)
    for x in random_members(small, rng, 20):
        assert membership(big, x, tol=1e-8)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 30), st.integers(0, 10_000))
def test_more_samples_never_enlarge_the_core(K, seed):
    rng = np.random.default_rng(seed)
    game = random_three_agent_game(rng)
    sg = sample_scenarios(game, K + 1, seed)
    bigger_sample = build_core(sg)
    if is_empty(bigger_sample)[0]:
        return
    fewer = build_core(sg.select(range(K)))
    for x in random_members(bigger_sample, rng, 20):
        assert membership(fewer, x, tol=1e-8)
