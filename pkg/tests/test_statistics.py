import numpy as np
import pandas as pd
import pytest

from data_classes import DescriptorError, EmptyInputError, RaggedMatrixError
from evaluation import (
    ResultMatrix,
    friedman_from_ranks,
    friedman_ranks,
    nemenyi_critical_difference,
    wilcoxon_signed_rank,
)

PUBLISHED_RANKS = {
    "DWM": 2.650,
    "NSE": 1.650,
    "AWE": 4.000,
    "AUE2": 6.150,
    "GOOWE": 7.650,
    "OAUE": 6.650,
    "OzaBag": 5.250,
    "LevBag": 6.100,
    "OzaBoost": 4.900,
}


@pytest.fixture
def accuracy(published_accuracy_path):
    return ResultMatrix.from_csv(published_accuracy_path)


def test_fixture_shape(accuracy):
    assert accuracy.algorithms == list(PUBLISHED_RANKS)
    assert len(accuracy.datasets) == 20


def test_average_ranks_match_published(accuracy):
    result = friedman_ranks(accuracy)
    for algorithm, rank in PUBLISHED_RANKS.items():
        assert result.average_ranks[algorithm] == pytest.approx(rank, abs=0.001)
    assert result.average_ranks.idxmax() == "GOOWE"


def test_friedman_degrees_of_freedom_and_significance(accuracy):
    result = friedman_ranks(accuracy)
    assert (result.df_numerator, result.df_denominator) == (8, 152)
    assert result.n_datasets == 20
    assert result.f_p < 0.05
    assert result.chi_square_p < 0.05
    assert result.critical_difference == pytest.approx(2.686, abs=0.01)


def test_ranks_sum_to_k_k_plus_one_over_two(accuracy):
    result = friedman_ranks(accuracy)
    assert result.average_ranks.sum() == pytest.approx(9 * 10 / 2)


def test_lower_is_better_flips_the_ranks(accuracy):
    up = friedman_ranks(accuracy).average_ranks
    down = friedman_ranks(accuracy, higher_is_better=False).average_ranks
    np.testing.assert_allclose(up + down, 10.0)


def test_ties_share_their_mean_rank():
    matrix = ResultMatrix(
        pd.DataFrame({"a": [1.0, 2.0], "b": [1.0, 1.0], "c": [0.0, 3.0]}, index=["d1", "d2"])
    )
    ranks = friedman_ranks(matrix).average_ranks
    assert ranks.to_dict() == pytest.approx({"a": 2.25, "b": 1.75, "c": 2.0})


def test_equal_ranks_give_zero_statistic():
    result = friedman_from_ranks(pd.Series([2.0, 2.0, 2.0], index=["a", "b", "c"]), 10)
    assert result.chi_square == pytest.approx(0.0)
    assert result.f_statistic == pytest.approx(0.0)
    assert result.f_p == pytest.approx(1.0)


def test_friedman_needs_two_algorithms():
    with pytest.raises(EmptyInputError):
        friedman_from_ranks(pd.Series([1.0], index=["a"]), 10)


def test_nemenyi_critical_difference():
    assert nemenyi_critical_difference(9, 20) == pytest.approx(2.686, abs=0.01)
    assert nemenyi_critical_difference(2, 30) < nemenyi_critical_difference(2, 10)


def test_wilcoxon_goowe_against_oaue(accuracy):
    result = wilcoxon_signed_rank(accuracy.column("GOOWE"), accuracy.column("OAUE"))
    assert (result.positive, result.negative) == (13, 7)
    assert result.n == 20
    assert result.method == "asymptotic"
    assert result.p_value == pytest.approx(0.014, abs=0.005)


def test_wilcoxon_drops_zero_differences():
    a = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0])
    b = np.array([1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0])
    result = wilcoxon_signed_rank(a, b)
    assert result.n == 6
    assert (result.positive, result.negative) == (6, 0)
    assert result.method == "exact"
    assert result.p_value == pytest.approx(2 / 2**6)


def test_wilcoxon_input_errors():
    with pytest.raises(ValueError):
        wilcoxon_signed_rank([1.0, 2.0], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        wilcoxon_signed_rank([1.0, 2.0], [2.0, 1.0])
    with pytest.raises(EmptyInputError):
        wilcoxon_signed_rank([1.0] * 6, [1.0] * 6)


def test_ragged_matrix_is_rejected(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("dataset,a,b\nd1,1.0,2.0\nd2,3.0,\n")
    with pytest.raises(RaggedMatrixError, match="d2/b"):
        ResultMatrix.from_csv(path)


def test_non_numeric_cell_is_rejected(tmp_path):
    path = tmp_path / "text.csv"
    path.write_text("dataset,a,b\nd1,1.0,fast\n")
    with pytest.raises(RaggedMatrixError):
        ResultMatrix.from_csv(path)


def test_unknown_column_lists_the_available_ones(accuracy):
    with pytest.raises(DescriptorError, match="GOOWE"):
        accuracy.column("Hedge")
