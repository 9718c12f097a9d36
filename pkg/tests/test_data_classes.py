import numpy as np
import pytest

from data_classes import (
    Attribute,
    ConsistencyError,
    DataChunk,
    Instance,
    InstanceWindow,
    InvalidScoreError,
    LeafPrediction,
    SchemaError,
    StreamSchema,
    ideal_point,
    normalize_scores,
    uniform_scores,
)


def test_normalize_scores_sums_to_one():
    np.testing.assert_allclose(normalize_scores([3.0, 1.0], 2), [0.75, 0.25])


def test_normalize_scores_all_zero_is_uniform():
    np.testing.assert_allclose(normalize_scores([0.0, 0.0, 0.0, 0.0], 4), [0.25] * 4)


def test_normalize_scores_rejects_negative_and_nan():
    with pytest.raises(InvalidScoreError):
        normalize_scores([0.5, -0.1], 2)
    with pytest.raises(InvalidScoreError):
        normalize_scores([np.nan, 1.0], 2)


def test_normalize_scores_rejects_wrong_length():
    with pytest.raises(SchemaError):
        normalize_scores([1.0, 2.0, 3.0], 2)


def test_ideal_point_is_one_hot():
    np.testing.assert_array_equal(ideal_point(2, 4), [0, 0, 1, 0])
    with pytest.raises(SchemaError):
        ideal_point(4, 4)


def test_uniform_scores():
    np.testing.assert_allclose(uniform_scores(5), np.full(5, 0.2))


def test_schema_needs_two_classes():
    with pytest.raises(SchemaError):
        StreamSchema((Attribute.numeric("x"),), ("only",))


def test_nominal_attribute_needs_values():
    with pytest.raises(SchemaError):
        Attribute.nominal("empty", ())


def test_check_instance(mixed_schema):
    mixed_schema.check_instance(Instance(np.array([0.3, 2.0]), 1))

    with pytest.raises(SchemaError):
        mixed_schema.check_instance(Instance(np.array([0.3]), 1))
    with pytest.raises(SchemaError):
        mixed_schema.check_instance(Instance(np.array([0.3, 3.0]), 1))
    with pytest.raises(SchemaError):
        mixed_schema.check_instance(Instance(np.array([np.inf, 0.0]), 1))
    with pytest.raises(SchemaError):
        mixed_schema.check_instance(Instance(np.array([0.3, 0.0]), 3))


def test_schema_derived_lookups(mixed_schema):
    assert mixed_schema.numeric_index.tolist() == [0]
    assert mixed_schema.nominal_index.tolist() == [1]
    assert mixed_schema.cardinalities.tolist() == [3]
    assert mixed_schema.n_classes == 3


def test_schema_dict_form(mixed_schema):
    restored = StreamSchema.from_dict(mixed_schema.to_dict())
    assert restored == mixed_schema
    assert restored.is_compatible(mixed_schema)


def test_instance_rejects_negative_weight():
    with pytest.raises(SchemaError):
        Instance(np.zeros(2), 0, weight=-1.0)


def test_leaf_prediction_from_str():
    assert LeafPrediction.from_str("MAJORITY_CLASS") is LeafPrediction.MAJORITY_CLASS
    with pytest.raises(ValueError):
        LeafPrediction.from_str("perceptron")


def test_window_evicts_oldest_first():
    window = InstanceWindow(2)
    first = Instance(np.zeros(1), 0)
    assert window.push(first, {0: np.array([1.0, 0.0])}) is None
    assert window.push(Instance(np.ones(1), 1), {0: np.array([0.0, 1.0])}) is None
    assert window.is_full

    evicted = window.push(Instance(np.ones(1), 0), {0: np.array([0.5, 0.5])})
    assert evicted is not None and evicted.instance is first
    assert len(window) == 2


def test_window_requires_scores_of_live_components():
    window = InstanceWindow(3)
    with pytest.raises(ConsistencyError):
        window.push(Instance(np.zeros(1), 0), {0: np.array([1.0, 0.0])}, live_components=[0, 1])


def test_window_fill_missing_and_forget():
    window = InstanceWindow(3)
    for label in (0, 1, 1):
        window.push(Instance(np.zeros(1), label), {0: np.array([0.5, 0.5])})

    filled = window.fill_missing(7, lambda x: ideal_point(x.label, 2))
    assert filled == 3
    assert window.fill_missing(7, lambda x: ideal_point(x.label, 2)) == 0
    assert [e.scores[7].tolist() for e in window] == [[1, 0], [0, 1], [0, 1]]

    window.forget(0)
    assert all(set(e.scores) == {7} for e in window)


def test_chunk_emits_exactly_when_full():
    chunk = DataChunk(3)
    outputs = [chunk.push(Instance(np.zeros(1), 0)) for _ in range(7)]
    emitted = [i for i, out in enumerate(outputs) if out is not None]
    assert emitted == [2, 5]
    assert len(outputs[2]) == 3
    assert len(chunk) == 1


def test_normalized_scores_sum_to_one_and_ignore_scale():
    rng = np.random.default_rng(17)
    for _ in range(200):
        p = int(rng.integers(2, 12))
        raw = rng.random(p) * 10.0 ** rng.uniform(-6, 6)
        raw[rng.random(p) < 0.3] = 0.0
        scores = normalize_scores(raw, p)
        assert scores.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(scores >= 0)

        scale = 10.0 ** rng.uniform(-6, 6)
        np.testing.assert_allclose(normalize_scores(raw * scale, p), scores, rtol=0, atol=1e-12)


def test_window_keeps_the_latest_instances_in_arrival_order():
    rng = np.random.default_rng(23)
    for _ in range(50):
        capacity = int(rng.integers(1, 20))
        n = int(rng.integers(0, 60))
        window = InstanceWindow(capacity)
        instances = [Instance(np.array([float(i)]), 0) for i in range(n)]
        evicted = []
        for x in instances:
            out = window.push(x, {})
            if out is not None:
                evicted.append(out.instance)

        assert [e.instance for e in window] == instances[-capacity:]
        assert len(window) == min(n, capacity)
        assert evicted == instances[: max(0, n - capacity)]
