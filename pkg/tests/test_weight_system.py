import numpy as np
import pytest

from data_classes import ConsistencyError, Instance, NoComponentsError, ideal_point, normalize_scores
from goowe import (
    WeightSystem,
    WindowedWeightSolver,
    accumulate_instance,
    accumulate_system,
    aggregate_votes,
    build_system,
    solve_weights,
)

WORKED_A = [[1.37, 1.11], [1.11, 1.05]]
WORKED_D = [1.61, 1.18]


def random_window(rng, m, p, n, duplicate=False):
    """n (score matrix, label) samples; rows are normalized component score vectors"""
    samples = []
    for _ in range(n):
        scores = rng.dirichlet(np.ones(p), size=m)
        if duplicate and m > 1:
            scores[-1] = scores[0]
        samples.append((scores, int(rng.integers(p))))
    return samples


def direct_objective(samples, w, p):
    return sum(
        float(np.sum((w @ scores - ideal_point(label, p)) ** 2)) for scores, label in samples
    )


def test_accumulate_single_component():
    A_i, d_i = accumulate_instance([[0.6, 0.4]], [1.0, 0.0])
    np.testing.assert_allclose(A_i, [[0.52]])
    np.testing.assert_allclose(d_i, [0.6])


def test_accumulate_perfect_component():
    A_i, d_i = accumulate_instance([[0.0, 1.0, 0.0]], ideal_point(1, 3))
    np.testing.assert_allclose(A_i, [[1.0]])
    np.testing.assert_allclose(d_i, [1.0])


def test_accumulate_identical_components_fill_all_entries():
    A_i, _ = accumulate_instance([[0.7, 0.3], [0.7, 0.3]], [0.0, 1.0])
    assert np.all(A_i == A_i[0, 0])


def test_accumulate_dimension_mismatch():
    with pytest.raises(ConsistencyError):
        accumulate_instance([[0.5, 0.5]], [1.0, 0.0, 0.0])


def test_worked_example_solve():
    solution = solve_weights(WeightSystem.from_arrays(WORKED_A, WORKED_D))
    np.testing.assert_allclose(solution.weights, [1.88, -0.87], atol=0.05)
    assert solution.rank == 2
    assert not solution.fallback


def test_identity_system_returns_d():
    d = np.array([0.3, -1.2, 2.0])
    solution = solve_weights(WeightSystem.from_arrays(np.eye(3), d))
    np.testing.assert_allclose(solution.weights, d)


def test_no_components_raises():
    with pytest.raises(NoComponentsError):
        solve_weights(WeightSystem(0))


def test_empty_system_falls_back_to_uniform():
    solution = solve_weights(WeightSystem(4))
    assert solution.fallback
    np.testing.assert_allclose(solution.weights, [0.25] * 4)


def test_non_finite_system_falls_back_to_uniform():
    system = WeightSystem.from_arrays([[np.nan, 0.0], [0.0, 1.0]], [1.0, 1.0])
    solution = solve_weights(system)
    assert solution.fallback
    np.testing.assert_allclose(solution.weights, [0.5, 0.5])


def test_rank_deficient_matches_least_squares_oracle():
    rng = np.random.default_rng(4)
    samples = random_window(rng, 3, 3, 15, duplicate=True)
    system = accumulate_system(samples, 3, 3)
    solution = solve_weights(system)

    assert solution.rank < 3
    oracle, *_ = np.linalg.lstsq(system.A, system.d, rcond=None)
    assert system.residual(solution.weights) == pytest.approx(
        system.residual(oracle), abs=1e-6
    )
    # minimum norm: duplicated components share their weight
    assert solution.weights[0] == pytest.approx(solution.weights[2], abs=1e-8)


@pytest.mark.parametrize("seed", range(200))
def test_solution_is_least_squares_optimal(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 6))
    p = int(rng.integers(2, 5))
    n = int(rng.integers(1, 21))
    samples = random_window(rng, m, p, n, duplicate=seed % 5 == 0)
    system = accumulate_system(samples, m, p)

    weights = solve_weights(system).weights
    oracle, *_ = np.linalg.lstsq(system.A, system.d, rcond=None)

    assert direct_objective(samples, weights, p) == pytest.approx(
        direct_objective(samples, oracle, p), rel=1e-6, abs=1e-9
    )


@pytest.mark.parametrize("seed", range(100))
def test_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(1000 + seed)
    m, p = 4, 3
    system = accumulate_system(random_window(rng, m, p, 10), m, p)
    w = rng.normal(size=m)

    h = 1e-5
    numeric = np.array(
        [
            (system.objective(w + h * e) - system.objective(w - h * e)) / (2 * h)
            for e in np.eye(m)
        ]
    )
    np.testing.assert_allclose(system.gradient(w), numeric, rtol=1e-4, atol=1e-6)


def test_objective_matches_direct_sum():
    rng = np.random.default_rng(8)
    samples = random_window(rng, 3, 4, 12)
    system = accumulate_system(samples, 3, 4)
    w = rng.normal(size=3)
    assert system.objective(w) == pytest.approx(direct_objective(samples, w, 4))


def test_gradient_vanishes_at_full_rank_solution():
    rng = np.random.default_rng(21)
    system = accumulate_system(random_window(rng, 3, 4, 20), 3, 4)
    solution = solve_weights(system)
    assert solution.rank == 3
    bound = 1e-6 * (1 + np.linalg.norm(system.d))
    assert np.max(np.abs(system.gradient(solution.weights))) <= bound


def test_system_is_symmetric_positive_semidefinite():
    rng = np.random.default_rng(2)
    system = accumulate_system(random_window(rng, 5, 3, 20), 5, 3)
    np.testing.assert_allclose(system.A, system.A.T, atol=1e-9)
    assert np.linalg.eigvalsh(system.A).min() >= -1e-8


def test_single_instance_window_equals_its_contribution():
    window_solver = WindowedWeightSolver(5, 2)
    window_solver.set_components([0, 1])
    scores = {0: np.array([0.8, 0.2]), 1: np.array([0.3, 0.7])}
    window_solver.push(Instance(np.zeros(1), 0), scores)
    window_solver.refresh(lambda cid, x: scores[cid])

    A_i, d_i = accumulate_instance([scores[0], scores[1]], [1.0, 0.0])
    np.testing.assert_allclose(window_solver.system.A, A_i)
    np.testing.assert_allclose(window_solver.system.d, d_i)


def synthetic_scorer(component_id, instance):
    raw = np.abs(np.sin(instance.features * (component_id + 1))) + 0.01
    return normalize_scores(raw, raw.size)


def test_incremental_system_matches_batch_after_churn():
    rng = np.random.default_rng(99)
    p = 3
    solver = WindowedWeightSolver(50, p)
    ids = [0, 1, 2]
    next_id = 3
    solver.set_components(ids)

    for step in range(1000):
        instance = Instance(rng.random(p), int(rng.integers(p)))
        solver.push(instance, {c: synthetic_scorer(c, instance) for c in ids})
        if step % 200 == 100:
            ids = ids[1:] + [next_id]
            next_id += 1
            solver.set_components(ids)
        solver.solve(synthetic_scorer)

    assert solver.rebuilds == 6
    batch = build_system(solver.window, ids, p)
    np.testing.assert_allclose(solver.system.A, batch.A, atol=1e-8, rtol=0)
    np.testing.assert_allclose(solver.system.d, batch.d, atol=1e-8, rtol=0)
    assert solver.system.n_instances == len(solver.window) == 50


def test_aggregate_single_component_is_identity():
    s = np.array([[0.2, 0.5, 0.3]])
    np.testing.assert_allclose(aggregate_votes(s, [1.0]), s[0])


def test_aggregate_uniform_components():
    s = np.full((3, 4), 0.25)
    np.testing.assert_allclose(aggregate_votes(s, [0.2, 1.5, 0.7]), [0.25] * 4)


def test_aggregate_worked_example():
    aggregated = aggregate_votes([[0.8, 0.2], [0.3, 0.7]], [1.88, -0.87])
    np.testing.assert_allclose(aggregated, [1.0, 0.0], atol=1e-12)


@pytest.mark.parametrize("c", [0.01, 0.5, 3.0, 250.0])
def test_aggregate_argmax_is_scale_invariant(c):
    rng = np.random.default_rng(6)
    s = rng.dirichlet(np.ones(4), size=3)
    w = np.array([1.2, -0.4, 0.3])
    assert np.argmax(aggregate_votes(s, w)) == np.argmax(aggregate_votes(s, c * w))


def test_perfect_component_wins_every_window_instance():
    rng = np.random.default_rng(12)
    p = 3
    labels = rng.integers(p, size=40)
    samples = [
        (np.vstack([ideal_point(y, p), np.full(p, 1 / p), np.full(p, 1 / p)]), int(y))
        for y in labels
    ]
    weights = solve_weights(accumulate_system(samples, 3, p)).weights
    for scores, label in samples:
        assert int(np.argmax(aggregate_votes(scores, weights))) == label
