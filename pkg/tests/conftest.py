from pathlib import Path

import numpy as np
import pytest

from data_classes import Attribute, Instance, StreamSchema

FIXTURES = Path(__file__).parent / "fixtures"


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run desk-scale acceptance runs"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def binary_schema() -> StreamSchema:
    return StreamSchema(
        attributes=(Attribute.numeric("x"), Attribute.numeric("y")),
        class_names=("neg", "pos"),
        name="toy",
    )


@pytest.fixture
def mixed_schema() -> StreamSchema:
    return StreamSchema(
        attributes=(
            Attribute.numeric("x"),
            Attribute.nominal("color", ("red", "green", "blue")),
        ),
        class_names=("a", "b", "c"),
        name="mixed",
    )


@pytest.fixture
def flag_schema() -> StreamSchema:
    return StreamSchema(
        attributes=(Attribute.numeric("x"), Attribute.nominal("flag", ("off", "on"))),
        class_names=("no", "yes"),
        name="flag",
    )


@pytest.fixture
def published_accuracy_path() -> Path:
    return FIXTURES / "published_accuracy.csv"


def separable_instances(n: int, seed: int = 0) -> list[Instance]:
    """Two noiseless classes on the unit square, split at x = 0.5"""
    rng = np.random.default_rng(seed)
    points = rng.random((n, 2))
    return [Instance(p, int(p[0] > 0.5)) for p in points]
