import pytest

from experiment_runner import ExperimentRunner
from run_config import SuiteDescriptor

LENGTH = 50_000

# a fresh 10-class concept every 5k instances, joined over 50 instances
ABRUPT = {"generator": "rbf-a-10-s", "length": LENGTH, "params": {"n_drifts": 9, "width": 50}}
STATIONARY = {"generator": "rbf-stationary", "length": LENGTH}


@pytest.fixture(scope="module")
def accuracy(tmp_path_factory):
    """Mean accuracy over five seeds per stream and vote rule, cells run in parallel"""
    suite = SuiteDescriptor.from_dict(
        {
            "ensembles": [
                {"algorithm": "base1", "rule": "goowe"},
                {"algorithm": "base1", "rule": "mv"},
            ],
            "streams": [ABRUPT, STATIONARY],
            "seeds": [1, 2, 3, 4, 5],
        }
    )
    result = ExperimentRunner.compare(suite, tmp_path_factory.mktemp("acceptance"))
    assert not result.failures
    return result.matrices["accuracy"]


@pytest.mark.slow
def test_optimal_weights_beat_majority_vote_under_abrupt_drift(accuracy):
    row = accuracy.loc["rbf-a-10-s"]
    assert row["base1[goowe]"] - row["base1[mv]"] >= 1.0


@pytest.mark.slow
def test_optimal_weights_match_majority_vote_without_drift(accuracy):
    row = accuracy.loc["rbf-stationary"]
    assert abs(row["base1[goowe]"] - row["base1[mv]"]) <= 0.5
