import math

import numpy as np
import pytest
from scipy.stats import norm

from conftest import separable_instances
from data_classes import Attribute, Instance, LeafPrediction, StreamSchema
from learners import HoeffdingTree, NaiveBayesModel, hoeffding_bound
from learners.hoeffding_tree import SplitNode, entropy, information_gain
from learners.naive_bayes import attribute_statistics_bytes


def prequential_accuracy(learner, instances) -> float:
    correct = 0
    for x in instances:
        scores = learner.score(x.features)
        correct += int(scores.sum() > 0 and int(np.argmax(scores)) == x.label)
        learner.train_on(x)
    return correct / len(instances)


def test_naive_bayes_empty_model_scores_zero(binary_schema):
    model = NaiveBayesModel(binary_schema)
    np.testing.assert_array_equal(model.score(np.array([0.2, 0.4])), [0.0, 0.0])


def test_naive_bayes_running_statistics_match_numpy(binary_schema):
    model = NaiveBayesModel(binary_schema)
    instances = separable_instances(500, seed=3)
    for x in instances:
        model.train_on(x)

    positives = np.array([x.features for x in instances if x.label == 1])
    np.testing.assert_allclose(model.numeric_mean[1], positives.mean(axis=0))
    np.testing.assert_allclose(model.variance()[1], positives.var(axis=0, ddof=1))
    assert model.class_counts[1] == len(positives)


def test_naive_bayes_learns_separable_stream(binary_schema):
    model = NaiveBayesModel(binary_schema)
    assert prequential_accuracy(model, separable_instances(2000)) > 0.95


def test_naive_bayes_nominal_counts(mixed_schema):
    model = NaiveBayesModel(mixed_schema)
    for _ in range(20):
        model.train_on(Instance(np.array([0.5, 2.0]), 2))
        model.train_on(Instance(np.array([0.5, 0.0]), 0))
    scores = model.score(np.array([0.5, 2.0]))
    assert int(np.argmax(scores)) == 2
    assert scores[1] == 0.0


def test_naive_bayes_memory_is_fixed(binary_schema):
    model = NaiveBayesModel(binary_schema)
    before = model.memory_estimate()
    for x in separable_instances(100):
        model.train_on(x)
    assert model.memory_estimate() == before == 64 + 8 * (2 + 5 * 2 * 2)


def test_hoeffding_bound_value():
    assert hoeffding_bound(1.0, 0.01, 100) == pytest.approx(math.sqrt(math.log(100) / 200))


def test_entropy_and_gain():
    assert entropy(np.array([5.0, 5.0])) == pytest.approx(1.0)
    assert entropy(np.array([4.0, 0.0])) == pytest.approx(0.0)
    parent = np.array([5.0, 5.0])
    assert information_gain(parent, np.array([[5.0, 0.0], [0.0, 5.0]])) == pytest.approx(1.0)
    assert information_gain(parent, np.array([[2.5, 2.5], [2.5, 2.5]])) == pytest.approx(0.0)


def test_tree_rejects_bad_hyperparameters(binary_schema):
    with pytest.raises(ValueError):
        HoeffdingTree(binary_schema, split_confidence=1.5)
    with pytest.raises(ValueError):
        HoeffdingTree(binary_schema, grace_period=0)


def test_tree_reaches_ninety_percent_on_separable_stream(binary_schema):
    tree = HoeffdingTree(binary_schema, grace_period=100, split_confidence=0.01, tie_threshold=0.05)
    accuracy = prequential_accuracy(tree, separable_instances(10_000, seed=11))
    assert accuracy >= 0.90
    assert tree.n_split_nodes >= 1


def test_tree_never_splits_constant_features(binary_schema):
    tree = HoeffdingTree(binary_schema)
    for i in range(3000):
        tree.train_on(Instance(np.array([0.5, 0.5]), i % 2))
    assert tree.n_split_nodes == 0
    assert tree.split_attempts >= 29
    assert tree.n_leaves == 1


def test_untrained_tree_memory(binary_schema):
    tree = HoeffdingTree(binary_schema)
    leaf_bytes = 96 + 2 * 8 * 2
    statistics_bytes = 8 * 5 * 2 * 2
    assert tree.memory_estimate() == 128 + leaf_bytes + statistics_bytes


def test_majority_class_leaves_score_counts(binary_schema):
    tree = HoeffdingTree(binary_schema, leaf_prediction=LeafPrediction.MAJORITY_CLASS)
    for label in (0, 1, 1):
        tree.train_on(Instance(np.array([0.1, 0.1]), label))
    np.testing.assert_array_equal(tree.score(np.array([0.9, 0.9])), [1.0, 2.0])


def test_prune_deactivates_leaves_and_freezes_their_counts(binary_schema):
    tree = HoeffdingTree(binary_schema)
    for x in separable_instances(5000, seed=5):
        tree.train_on(x)
    assert tree.n_active_leaves >= 2
    before = tree.memory_estimate()

    tree.prune(0)

    assert tree.n_active_leaves == 0
    assert tree.memory_estimate() < before
    assert tree.n_leaves == len(tree.leaves())

    query = np.array([0.1, 0.2])
    frozen = tree.score(query)
    seen = tree.instances_seen
    for _ in range(500):
        tree.train_on(Instance(query, 1))
    np.testing.assert_array_equal(tree.score(query), frozen)
    assert tree.instances_seen == seen + 500
    assert tree.memory_estimate() <= before


def flag_instances(n: int, seed: int = 0) -> list[Instance]:
    """Label equals a binary nominal flag; x is noise"""
    rng = np.random.default_rng(seed)
    return [
        Instance(np.array([rng.random(), float(flag)]), int(flag))
        for flag in rng.integers(0, 2, size=n)
    ]


def test_separating_nominal_attribute_splits_the_root(flag_schema):
    tree = HoeffdingTree(flag_schema)
    for x in flag_instances(1000, seed=1):
        tree.train_on(x)
    assert isinstance(tree.root, SplitNode)
    assert tree.root.attribute == 1
    assert tree.root.threshold is None


def test_no_split_attempt_inside_the_grace_period(binary_schema):
    tree = HoeffdingTree(binary_schema, grace_period=100)
    instances = separable_instances(100, seed=4)
    for x in instances[:99]:
        tree.train_on(x)
    assert tree.split_attempts == 0
    tree.train_on(instances[99])
    assert tree.split_attempts == 1


def split_flag_tree(flag_schema) -> HoeffdingTree:
    """A root split on the flag with 10 instances under one leaf and 10,000 under the other"""
    tree = HoeffdingTree(flag_schema)
    for x in flag_instances(100, seed=2):
        tree.train_on(x)
    assert isinstance(tree.root, SplitNode)

    rng = np.random.default_rng(3)
    for flag, count in ((0, 10), (1, 10_000)):
        for value in rng.random(count):
            tree.train_on(Instance(np.array([value, float(flag)]), flag))
    return tree


def test_prune_deactivates_the_least_active_leaf_first(flag_schema):
    tree = split_flag_tree(flag_schema)
    quiet, busy = tree.root.children
    assert (quiet.seen, busy.seen) == (10, 10_000)

    tree.prune(tree.memory_estimate() - attribute_statistics_bytes(flag_schema))

    assert not quiet.active
    assert busy.active


def test_prune_is_idempotent_and_spares_untouched_leaves(flag_schema):
    tree = split_flag_tree(flag_schema)
    queries = [np.array([v, 1.0]) for v in np.linspace(0.0, 1.0, 11)]
    busy_scores = [tree.score(q) for q in queries]
    target = tree.memory_estimate() - attribute_statistics_bytes(flag_schema)

    tree.prune(target)
    memory, active = tree.memory_estimate(), tree.n_active_leaves
    tree.prune(target)

    assert (tree.memory_estimate(), tree.n_active_leaves) == (memory, active)
    for q, expected in zip(queries, busy_scores):
        np.testing.assert_array_equal(tree.score(q), expected)


def test_adaptive_leaf_uses_naive_bayes_once_it_beats_the_majority(binary_schema):
    tree = HoeffdingTree(binary_schema, grace_period=100_000)
    for x in separable_instances(2000, seed=6):
        tree.train_on(x)
    leaf = tree.root
    assert leaf.nb_correct > leaf.mc_correct

    query = np.array([0.9, 0.5])
    np.testing.assert_array_equal(tree.score(query), leaf.model.score(query))


def test_adaptive_leaf_keeps_the_majority_when_naive_bayes_is_no_better(binary_schema):
    tree = HoeffdingTree(binary_schema, grace_period=100_000)
    for i in range(1000):
        tree.train_on(Instance(np.array([0.5, 0.5]), int(i % 10 >= 7)))
    leaf = tree.root
    assert leaf.nb_correct == leaf.mc_correct

    np.testing.assert_array_equal(tree.score(np.array([0.5, 0.5])), [700.0, 300.0])


def test_naive_bayes_matches_the_gaussian_posterior():
    schema = StreamSchema((Attribute.numeric("x"),), ("a", "b"), name="gauss")
    rng = np.random.default_rng(9)
    samples = {0: rng.normal(0.0, 1.0, 200), 1: rng.normal(3.0, 1.5, 300)}
    model = NaiveBayesModel(schema)
    for label, values in samples.items():
        for v in values:
            model.train_on(Instance(np.array([v]), label))

    prior = np.array([200.0, 300.0]) / 500.0
    for q in rng.uniform(-3.0, 7.0, 100):
        oracle = prior * np.array(
            [norm.pdf(q, v.mean(), v.std(ddof=1)) for v in samples.values()]
        )
        scores = model.score(np.array([q]))
        assert int(np.argmax(scores)) == int(np.argmax(oracle))
        np.testing.assert_allclose(scores / scores.sum(), oracle / oracle.sum(), rtol=1e-6, atol=1e-12)


def test_naive_bayes_single_instance_predicts_its_label(mixed_schema):
    model = NaiveBayesModel(mixed_schema)
    x = Instance(np.array([0.3, 1.0]), 2)
    model.train_on(x)
    assert int(np.argmax(model.score(x.features))) == 2


def test_same_stream_grows_the_same_tree(binary_schema):
    def grow():
        tree = HoeffdingTree(binary_schema)
        for x in separable_instances(5000, seed=2):
            tree.train_on(x)
        return tree

    first, second = grow(), grow()
    assert (first.n_nodes, first.split_attempts) == (second.n_nodes, second.split_attempts)
    assert first.memory_estimate() == second.memory_estimate()
    for q in np.random.default_rng(0).random((50, 2)):
        np.testing.assert_array_equal(first.score(q), second.score(q))


def test_hoeffding_bound_shrinks_with_more_instances():
    bounds = [hoeffding_bound(1.0, 0.01, n) for n in (10, 100, 1000, 10_000)]
    assert all(a > b for a, b in zip(bounds, bounds[1:]))


def test_prune_is_noop_under_target(binary_schema):
    tree = HoeffdingTree(binary_schema)
    for x in separable_instances(300):
        tree.train_on(x)
    active = tree.n_active_leaves
    tree.prune(tree.memory_estimate())
    assert tree.n_active_leaves == active
