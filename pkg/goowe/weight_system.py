import functools
import logging
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
import numpy.typing as npt
import scipy.linalg

from data_classes import (
    ConsistencyError,
    Instance,
    InstanceWindow,
    NoComponentsError,
    ScoreVector,
    WindowEntry,
    ideal_point,
    normalize_scores,
    uniform_scores,
)

logger = logging.getLogger(__name__)

# Pivots of R below RANK_RCOND · |R[0, 0]| count as zero
RANK_RCOND = 1e-10

Scorer = Callable[[int, Instance], ScoreVector]


def accumulate_instance(
    scores: npt.ArrayLike, ideal: npt.ArrayLike
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """
    One instance's contribution to the weight system

    Args:
        scores (ArrayLike): m × p matrix, row j the normalized score vector of component j
        ideal (ArrayLike): The instance's ideal point (length p)

    Returns:
        tuple: A_i with A_i[q][j] = Σ_k S^k_q·S^k_j, and d_i with d_i[q] = Σ_k O^k·S^k_q

    Raises:
        ConsistencyError: If the dimensions disagree
    """
    s = np.asarray(scores, dtype=np.float64)
    o = np.asarray(ideal, dtype=np.float64)
    if s.ndim != 2 or o.ndim != 1 or s.shape[1] != o.shape[0]:
        raise ConsistencyError(
            f"Score matrix {s.shape} does not match ideal point {o.shape}"
        )
    return s @ s.T, s @ o


@dataclass
class WeightSolution:
    weights: npt.NDArray[np.float64]
    rank: int
    fallback: bool = False


class WeightSystem:
    """The linear system A w = d whose least-squares solution weighs the components"""

    def __init__(self, size: int):
        self.A = np.zeros((size, size))
        self.d = np.zeros(size)
        # Σ ‖o_i‖² over accumulated instances; one-hot ideal points make it a count
        self.ideal_norm = 0.0
        self.weights: npt.NDArray[np.float64] | None = None

    @property
    def size(self) -> int:
        return self.d.shape[0]

    @property
    def n_instances(self) -> int:
        return int(round(self.ideal_norm))

    @classmethod
    def from_arrays(
        cls, A: npt.ArrayLike, d: npt.ArrayLike, n_instances: int = 1
    ) -> "WeightSystem":
        A = np.asarray(A, dtype=np.float64)
        d = np.asarray(d, dtype=np.float64)
        if A.shape != (d.shape[0], d.shape[0]):
            raise ConsistencyError(f"A {A.shape} does not match d {d.shape}")
        system = cls(d.shape[0])
        system.A[:] = A
        system.d[:] = d
        system.ideal_norm = float(n_instances)
        return system

    def add(self, A_i: npt.NDArray[np.float64], d_i: npt.NDArray[np.float64]) -> None:
        self.A += A_i
        self.d += d_i
        self.ideal_norm += 1.0

    def subtract(
        self, A_i: npt.NDArray[np.float64], d_i: npt.NDArray[np.float64]
    ) -> None:
        self.A -= A_i
        self.d -= d_i
        self.ideal_norm -= 1.0

    def objective(self, w: npt.ArrayLike) -> float:
        """Σ_i Σ_k (Σ_j W_j S^k_ij − O^k_i)², expanded as wᵀAw − 2dᵀw + Σ‖o‖²"""
        w = np.asarray(w, dtype=np.float64)
        return float(w @ self.A @ w - 2.0 * self.d @ w + self.ideal_norm)

    def gradient(self, w: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """∂f/∂W_q = 2 (A w − d)_q"""
        w = np.asarray(w, dtype=np.float64)
        return 2.0 * (self.A @ w - self.d)

    def residual(self, w: npt.ArrayLike) -> float:
        """‖d − A w‖₂"""
        return float(np.linalg.norm(self.d - self.A @ np.asarray(w, dtype=np.float64)))

    def solve(self) -> WeightSolution:
        solution = solve_weights(self)
        self.weights = solution.weights
        return solution


def accumulate_system(
    samples: Iterable[tuple[npt.NDArray[np.float64], int]], size: int, n_classes: int
) -> WeightSystem:
    """Sum A_i and d_i over (score matrix, label) samples"""
    system = WeightSystem(size)
    for scores, label in samples:
        system.add(*accumulate_instance(scores, ideal_point(label, n_classes)))
    return system


def stack_scores(entry: WindowEntry, component_ids: list[int]) -> npt.NDArray[np.float64]:
    """The m × p score matrix cached for a windowed instance"""
    try:
        return np.vstack([entry.scores[c] for c in component_ids])
    except KeyError as e:
        raise ConsistencyError(f"No cached scores for component {e}") from e


def build_system(
    entries: Iterable[WindowEntry], component_ids: list[int], n_classes: int
) -> WeightSystem:
    """
    Weight system over all windowed instances, from their cached scores

    Args:
        entries (Iterable[WindowEntry]): The window contents
        component_ids (list[int]): Component order of the rows and columns
        n_classes (int): The class count p

    Returns:
        WeightSystem: A = Σ A_i and d = Σ d_i
    """
    return accumulate_system(
        ((stack_scores(e, component_ids), e.instance.label) for e in entries),
        len(component_ids),
        n_classes,
    )


def _uniform_weights(size: int) -> npt.NDArray[np.float64]:
    return np.full(size, 1.0 / size)


def solve_weights(system: WeightSystem) -> WeightSolution:
    """
    Least-squares solution of A w = d

    Full-rank systems are solved through a pivoted QR factorization of A.
    Rank-deficient systems get the minimum-norm solution from the complete
    orthogonal factorization (LAPACK gelsy). An empty or non-finite result
    falls back to uniform weights 1/m.

    Args:
        system (WeightSystem): A populated system

    Returns:
        WeightSolution: The weights, the numerical rank of A and the fallback flag

    Raises:
        NoComponentsError: If the system has no components
    """
    m = system.size
    if m == 0:
        raise NoComponentsError("Cannot solve a weight system without components")
    if system.n_instances <= 0:
        logger.debug("Empty weight system, using uniform weights")
        return WeightSolution(_uniform_weights(m), rank=0, fallback=True)

    A, d = system.A, system.d
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(d))):
        logger.warning("Weight system holds non-finite entries, using uniform weights")
        return WeightSolution(_uniform_weights(m), rank=0, fallback=True)

    q, r, pivots = scipy.linalg.qr(A, pivoting=True)
    pivot_sizes = np.abs(np.diag(r))
    rank = int(np.count_nonzero(pivot_sizes > RANK_RCOND * pivot_sizes[0]))

    if rank == 0:
        weights = np.full(m, np.nan)
    elif rank == m:
        weights = np.empty(m)
        weights[pivots] = scipy.linalg.solve_triangular(r, q.T @ d)
    else:
        weights, *_ = scipy.linalg.lstsq(A, d, cond=RANK_RCOND, lapack_driver="gelsy")

    if not np.all(np.isfinite(weights)):
        logger.warning(
            f"Weight solve produced non-finite weights (rank {rank} of {m}), "
            "using uniform weights"
        )
        return WeightSolution(_uniform_weights(m), rank=rank, fallback=True)

    return WeightSolution(weights, rank=rank)


def aggregate_votes(scores: npt.ArrayLike, weights: npt.ArrayLike) -> ScoreVector:
    """
    Weighted vote of the components' score vectors

    The weighted sum is min-max rescaled across classes when it has a negative
    entry (negative weights can push it below zero), then normalized to sum to one.

    Args:
        scores (ArrayLike): m × p matrix of normalized component scores
        weights (ArrayLike): One weight per component

    Returns:
        ScoreVector: The aggregated score vector; its argmax is the prediction
    """
    s = np.asarray(scores, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    n_classes = s.shape[1]
    raw = w @ s

    low, high = raw.min(), raw.max()
    if not (np.isfinite(low) and np.isfinite(high)) or high == low:
        return uniform_scores(n_classes)
    if low < 0:
        raw = (raw - low) / (high - low)
    return normalize_scores(raw, n_classes)


class WindowedWeightSolver:
    """
    Keeps the weight system of a sliding instance window current.

    Pushes add the newest instance's A_i, d_i and subtract the evicted one's.
    A change of components marks the system stale; the next solve scores the
    windowed instances a new component has not seen and rebuilds A, d.
    """

    def __init__(self, capacity: int, n_classes: int):
        self.window = InstanceWindow(capacity)
        self.n_classes = n_classes
        self.component_ids: list[int] = []
        self.system = WeightSystem(0)
        self._stale = False
        self.rebuilds = 0

    def set_components(self, component_ids: list[int]) -> None:
        """Track a new component list (order = weight vector order)"""
        for removed in set(self.component_ids) - set(component_ids):
            self.window.forget(removed)
        self.component_ids = list(component_ids)
        self._stale = True

    def push(self, instance: Instance, scores_by_component: dict[int, ScoreVector]) -> None:
        evicted = self.window.push(instance, scores_by_component, self.component_ids)
        if self._stale or not self.component_ids:
            return
        if evicted is not None:
            self.system.subtract(*self._contribution(evicted))
        self.system.add(
            *accumulate_instance(
                stack_scores_from(scores_by_component, self.component_ids),
                ideal_point(instance.label, self.n_classes),
            )
        )

    def _contribution(
        self, entry: WindowEntry
    ) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
        return accumulate_instance(
            stack_scores(entry, self.component_ids),
            ideal_point(entry.instance.label, self.n_classes),
        )

    def refresh(self, scorer: Scorer) -> None:
        """Fill missing cached scores and rebuild A, d if components changed"""
        if not self._stale:
            return
        for component_id in self.component_ids:
            self.window.fill_missing(component_id, functools.partial(scorer, component_id))
        self.system = build_system(self.window, self.component_ids, self.n_classes)
        self._stale = False
        self.rebuilds += 1

    def solve(self, scorer: Scorer) -> WeightSolution:
        self.refresh(scorer)
        return self.system.solve()


def stack_scores_from(
    scores_by_component: dict[int, ScoreVector], component_ids: list[int]
) -> npt.NDArray[np.float64]:
    try:
        return np.vstack([scores_by_component[c] for c in component_ids])
    except KeyError as e:
        raise ConsistencyError(f"No scores for component {e}") from e
