import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import numpy.typing as npt
import pandas as pd
from scipy import stats
from statsmodels.stats.libqsturng import qsturng

from data_classes import DescriptorError, EmptyInputError, RaggedMatrixError

logger = logging.getLogger(__name__)


@dataclass
class ResultMatrix:
    """Datasets (rows) × algorithms (columns) grid of one measure"""

    frame: pd.DataFrame

    def __post_init__(self) -> None:
        if self.frame.empty:
            raise EmptyInputError("Result matrix is empty")
        missing = [
            f"{dataset}/{algorithm}"
            for dataset, row in self.frame.iterrows()
            for algorithm, value in row.items()
            if pd.isna(value)
        ]
        if missing:
            raise RaggedMatrixError(f"Result matrix has missing cells: {', '.join(missing)}")

    @classmethod
    def from_csv(cls, path: str | Path) -> "ResultMatrix":
        """Read a matrix CSV; the first column names the datasets, '#' lines are comments"""
        frame = pd.read_csv(path, index_col=0, comment="#")
        try:
            frame = frame.apply(pd.to_numeric)
        except ValueError as e:
            raise RaggedMatrixError(f"{path}: non-numeric cell ({e})") from e
        return cls(frame)

    @property
    def algorithms(self) -> list[str]:
        return [str(c) for c in self.frame.columns]

    @property
    def datasets(self) -> list[str]:
        return [str(i) for i in self.frame.index]

    def column(self, algorithm: str) -> npt.NDArray[np.float64]:
        if algorithm not in self.frame.columns:
            raise DescriptorError(
                f"Unknown algorithm column: {algorithm} (available: {', '.join(self.algorithms)})"
            )
        return self.frame[algorithm].to_numpy(dtype=np.float64)


@dataclass
class FriedmanResult:
    average_ranks: pd.Series
    n_datasets: int
    chi_square: float
    chi_square_p: float
    f_statistic: float
    f_p: float
    df_numerator: int
    df_denominator: int
    critical_difference: float
    alpha: float = 0.05

    def to_dict(self) -> dict[str, Any]:
        return {
            "average_ranks": {k: float(v) for k, v in self.average_ranks.items()},
            "n_datasets": self.n_datasets,
            "chi_square": self.chi_square,
            "chi_square_p": self.chi_square_p,
            "f_statistic": self.f_statistic,
            "f_p": self.f_p,
            "df_numerator": self.df_numerator,
            "df_denominator": self.df_denominator,
            "critical_difference": self.critical_difference,
            "alpha": self.alpha,
        }


def nemenyi_critical_difference(n_algorithms: int, n_datasets: int, alpha: float = 0.05) -> float:
    """Critical rank difference of the Nemenyi post-hoc test"""
    q = float(qsturng(1 - alpha, n_algorithms, np.inf))
    return q * math.sqrt(n_algorithms * (n_algorithms + 1) / (12.0 * n_datasets))


def friedman_from_ranks(
    average_ranks: pd.Series, n_datasets: int, alpha: float = 0.05
) -> FriedmanResult:
    """
    Friedman χ² and its F-distributed correction from average ranks

    Args:
        average_ranks (Series): Mean rank per algorithm
        n_datasets (int): N, the number of datasets ranked
        alpha (float): Significance level of the critical difference

    Returns:
        FriedmanResult: Statistics, p-values, degrees of freedom and Nemenyi CD
    """
    k = len(average_ranks)
    n = n_datasets
    if k < 2 or n < 2:
        raise EmptyInputError(f"Friedman test needs k ≥ 2 and N ≥ 2, got k={k}, N={n}")

    ranks = average_ranks.to_numpy(dtype=np.float64)
    chi_square = 12.0 * n / (k * (k + 1)) * (np.sum(ranks**2) - k * (k + 1) ** 2 / 4.0)
    chi_square = max(0.0, float(chi_square))
    df_numerator = k - 1
    df_denominator = (k - 1) * (n - 1)

    denominator = n * (k - 1) - chi_square
    if denominator <= 0:
        f_statistic, f_p = math.inf, 0.0
    else:
        f_statistic = (n - 1) * chi_square / denominator
        f_p = float(stats.f.sf(f_statistic, df_numerator, df_denominator))

    return FriedmanResult(
        average_ranks=average_ranks,
        n_datasets=n,
        chi_square=chi_square,
        chi_square_p=float(stats.chi2.sf(chi_square, df_numerator)),
        f_statistic=f_statistic,
        f_p=f_p,
        df_numerator=df_numerator,
        df_denominator=df_denominator,
        critical_difference=nemenyi_critical_difference(k, n, alpha),
        alpha=alpha,
    )


def friedman_ranks(
    matrix: ResultMatrix, higher_is_better: bool = True, alpha: float = 0.05
) -> FriedmanResult:
    """
    Rank algorithms per dataset and test whether the mean ranks differ

    The best algorithm on a dataset gets rank k and the worst rank 1, so a
    higher average rank is better. Ties share their mean rank.

    Args:
        matrix (ResultMatrix): Datasets × algorithms
        higher_is_better (bool): False for time and memory matrices
        alpha (float): Significance level of the critical difference

    Returns:
        FriedmanResult: Average ranks and test statistics
    """
    values = matrix.frame.to_numpy(dtype=np.float64)
    ranks = stats.rankdata(values if higher_is_better else -values, method="average", axis=1)
    average_ranks = pd.Series(ranks.mean(axis=0), index=matrix.algorithms, name="average_rank")
    result = friedman_from_ranks(average_ranks, len(matrix.datasets), alpha)
    logger.debug(f"Friedman χ²={result.chi_square:.3f}, F_F={result.f_statistic:.3f}")
    return result


@dataclass
class WilcoxonResult:
    positive: int
    negative: int
    statistic: float
    p_value: float
    n: int
    method: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "positive": self.positive,
            "negative": self.negative,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "n": self.n,
            "method": self.method,
        }


def wilcoxon_signed_rank(a: npt.ArrayLike, b: npt.ArrayLike) -> WilcoxonResult:
    """
    Two-tailed Wilcoxon signed-rank test of paired samples a, b

    Zero differences are dropped. From 10 non-zero pairs on, the p-value
    comes from the normal approximation with tie and continuity correction;
    smaller samples use the exact distribution.

    Args:
        a (ArrayLike): Scores of the first algorithm per dataset
        b (ArrayLike): Scores of the second algorithm on the same datasets

    Returns:
        WilcoxonResult: Counts of positive and negative differences, T and p

    Raises:
        ValueError: If the samples differ in length or hold fewer than 5 pairs
        EmptyInputError: If every difference is zero
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"Paired samples differ in length: {a.shape} vs {b.shape}")
    if a.size < 5:
        raise ValueError(f"Wilcoxon test needs at least 5 pairs, got {a.size}")

    differences = a - b
    differences = differences[differences != 0]
    if differences.size == 0:
        raise EmptyInputError("All paired differences are zero")

    method = "asymptotic" if differences.size >= 10 else "exact"
    result = stats.wilcoxon(differences, zero_method="wilcox", correction=True, method=method)
    return WilcoxonResult(
        positive=int(np.count_nonzero(differences > 0)),
        negative=int(np.count_nonzero(differences < 0)),
        statistic=float(result.statistic),
        p_value=float(result.pvalue),
        n=int(differences.size),
        method=method,
    )
