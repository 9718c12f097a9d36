import logging
import re
from enum import Enum
from typing import TYPE_CHECKING, Callable

import numpy as np
import numpy.typing as npt

from data_classes import (
    DescriptorError,
    EmptyInputError,
    IncrementalClassifier,
    Instance,
    NoComponentsError,
    Prediction,
    ScoreVector,
)
from goowe import (
    WindowedWeightSolver,
    aggregate_votes,
    chunk_weight_system,
    component_scores,
    least_weighted,
    solve_weights,
)

if TYPE_CHECKING:
    from .block_ensemble import BlockEnsemble

logger = logging.getLogger(__name__)

AUE2_EPSILON = 1e-9
DWM_BETA = 0.5
DWM_THETA = 0.01


def mv_weights(m: int) -> npt.NDArray[np.float64]:
    """Unweighted vote over m components"""
    if m < 1:
        raise NoComponentsError("Majority vote needs at least one component")
    return np.ones(m)


def dwm_update(
    weights: npt.ArrayLike,
    correct: npt.ArrayLike,
    beta: float = DWM_BETA,
    theta: float = DWM_THETA,
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.bool_]]:
    """
    Multiplicative punishment of wrong components

    Args:
        weights (ArrayLike): Current weights
        correct (ArrayLike): Whether each component predicted the label
        beta (float): Punishment factor in [0, 1]
        theta (float): Weights below it are flagged for removal

    Returns:
        tuple: Weights rescaled to a maximum of 1, and the removal flags
    """
    if not 0 <= beta <= 1:
        raise ValueError(f"DWM beta must be in [0, 1], got {beta}")
    updated = np.array(weights, dtype=np.float64)
    updated[~np.asarray(correct, dtype=bool)] *= beta
    top = updated.max(initial=0.0)
    if top > 0:
        updated /= top
    return updated, updated < theta


def _true_class_scores(
    learner: IncrementalClassifier, chunk: list[Instance], n_classes: int
) -> npt.NDArray[np.float64]:
    return np.array(
        [component_scores(learner, x.features, n_classes)[x.label] for x in chunk]
    )


def true_class_error(true_class_scores: npt.ArrayLike) -> float:
    """Mean of (1 - s)² over normalized true-class scores s"""
    s = np.asarray(true_class_scores, dtype=np.float64)
    if s.size == 0:
        raise EmptyInputError("MSE of a component needs a non-empty chunk")
    return float(np.mean((1.0 - s) ** 2))


def mse_i(learner: IncrementalClassifier, chunk: list[Instance], n_classes: int) -> float:
    """Mean of (1 - normalized score of the true class)² over the chunk"""
    if not chunk:
        raise EmptyInputError("MSE of a component needs a non-empty chunk")
    return true_class_error(_true_class_scores(learner, chunk, n_classes))


def mse_r(chunk: list[Instance], n_classes: int) -> float:
    """Σ_c P(c)·(1 - P(c))², the error of a classifier guessing by the chunk's class prior"""
    if not chunk:
        raise EmptyInputError("Reference MSE needs a non-empty chunk")
    prior = np.bincount([x.label for x in chunk], minlength=n_classes) / len(chunk)
    return float(np.sum(prior * (1.0 - prior) ** 2))


def awe_weight(reference: float, error: float) -> float:
    return max(0.0, reference - error)


def aue2_weight(reference: float, error: float, epsilon: float = AUE2_EPSILON) -> float:
    if epsilon <= 0:
        raise ValueError(f"AUE2 epsilon must be positive, got {epsilon}")
    return 1.0 / (reference + error + epsilon)


def awe_weights(
    learners: list[IncrementalClassifier], chunk: list[Instance], n_classes: int
) -> npt.NDArray[np.float64]:
    """w_i = max(0, MSE_r - MSE_i)"""
    reference = mse_r(chunk, n_classes)
    return np.array([awe_weight(reference, mse_i(l, chunk, n_classes)) for l in learners])


def aue2_weights(
    learners: list[IncrementalClassifier],
    chunk: list[Instance],
    n_classes: int,
    epsilon: float = AUE2_EPSILON,
) -> npt.NDArray[np.float64]:
    """w_i = 1 / (MSE_r + MSE_i + ε)"""
    reference = mse_r(chunk, n_classes)
    return np.array(
        [aue2_weight(reference, mse_i(l, chunk, n_classes), epsilon) for l in learners]
    )


class RuleName(Enum):
    """Weighting rules selectable by name"""

    MV = "mv"
    DWM = "dwm"
    AWE = "awe"
    AUE2 = "aue2"
    GOOWE = "goowe"
    GOOWE_MIN = "goowe_min"
    GOOWE_MAX = "goowe_max"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def from_str(cls, name: str) -> "RuleName":
        """Convert a string to a RuleName enum"""
        for member in cls:
            if member.value == name.lower():
                return member
        raise DescriptorError(
            f"Unknown weighting rule: {name} (expected one of "
            f"{', '.join(m.value for m in cls)})"
        )


class WeightSource(Enum):
    """Instances the GOOWE rule solves its weights over"""

    WINDOW = "window"
    CHUNK = "chunk"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def from_str(cls, source: str) -> "WeightSource":
        """Convert a string to a WeightSource enum"""
        for member in cls:
            if member.value == source.lower():
                return member
        raise DescriptorError(
            f"Invalid weight source: {source} (expected one of "
            f"{', '.join(m.value for m in cls)})"
        )


class WeightingRule:
    """
    A way of weighting votes and picking replacement victims.

    A BlockEnsemble calls the hooks of both its vote rule and its replacement
    rule, so online rules keep their state whichever role they play.
    """

    name = "rule"

    def bind(self, ensemble: "BlockEnsemble") -> None:
        self.n_classes = ensemble.n_classes

    def weights(self, ensemble: "BlockEnsemble") -> npt.NDArray[np.float64]:
        raise NotImplementedError

    def predict(self, ensemble: "BlockEnsemble", scores: dict[int, ScoreVector]) -> Prediction:
        stacked = np.vstack([scores[c.id] for c in ensemble.components])
        aggregated = aggregate_votes(stacked, self.weights(ensemble))
        return Prediction(aggregated, int(np.argmax(aggregated)))

    def observe(
        self, ensemble: "BlockEnsemble", instance: Instance, scores: dict[int, ScoreVector]
    ) -> None:
        pass

    def evaluate_chunk(self, ensemble: "BlockEnsemble", chunk: list[Instance]) -> None:
        pass

    def select_victim(self, ensemble: "BlockEnsemble", chunk: list[Instance]) -> int:
        return least_weighted(self.weights(ensemble))

    def components_changed(self, ensemble: "BlockEnsemble", chunk: list[Instance]) -> None:
        pass


class MajorityVote(WeightingRule):
    name = "mv"

    def weights(self, ensemble: "BlockEnsemble") -> npt.NDArray[np.float64]:
        return mv_weights(len(ensemble.components))


class DynamicWeightedMajority(WeightingRule):
    """Per-instance multiplicative punishment; weights below θ drop out of the vote"""

    name = "dwm"

    def __init__(self, beta: float = DWM_BETA, theta: float = DWM_THETA):
        if not 0 <= beta <= 1:
            raise DescriptorError(f"DWM beta must be in [0, 1], got {beta}")
        self.beta = beta
        self.theta = theta
        self._weights: dict[int, float] = {}

    def raw_weights(self, ensemble: "BlockEnsemble") -> npt.NDArray[np.float64]:
        return np.array([self._weights.get(c.id, 1.0) for c in ensemble.components])

    def weights(self, ensemble: "BlockEnsemble") -> npt.NDArray[np.float64]:
        raw = self.raw_weights(ensemble)
        return np.where(raw < self.theta, 0.0, raw)

    def observe(
        self, ensemble: "BlockEnsemble", instance: Instance, scores: dict[int, ScoreVector]
    ) -> None:
        if not ensemble.components:
            return
        correct = [int(np.argmax(scores[c.id])) == instance.label for c in ensemble.components]
        updated, flagged = dwm_update(self.raw_weights(ensemble), correct, self.beta, self.theta)
        self._weights = {c.id: float(w) for c, w in zip(ensemble.components, updated)}
        if flagged.any():
            logger.debug(f"DWM flagged components {np.asarray(ensemble.component_ids)[flagged]}")

    def select_victim(self, ensemble: "BlockEnsemble", chunk: list[Instance]) -> int:
        return least_weighted(self.raw_weights(ensemble))

    def components_changed(self, ensemble: "BlockEnsemble", chunk: list[Instance]) -> None:
        self._weights = {c.id: self._weights.get(c.id, 1.0) for c in ensemble.components}


class ChunkErrorRule(WeightingRule):
    """Weights from each component's error on the latest chunk; a new candidate counts as perfect"""

    weight_of: Callable[[float, float], float]

    def __init__(self) -> None:
        self._weights: dict[int, float] = {}
        self._reference = 0.0

    def weights(self, ensemble: "BlockEnsemble") -> npt.NDArray[np.float64]:
        return np.array([self._weights.get(c.id, 0.0) for c in ensemble.components])

    def evaluate_chunk(self, ensemble: "BlockEnsemble", chunk: list[Instance]) -> None:
        self._reference = mse_r(chunk, self.n_classes)
        scores = ensemble.chunk_scores(chunk)
        self._weights = {
            c.id: self.weight_of(
                self._reference,
                true_class_error([s[c.id][x.label] for s, x in zip(scores, chunk)]),
            )
            for c in ensemble.components
        }

    def components_changed(self, ensemble: "BlockEnsemble", chunk: list[Instance]) -> None:
        self._weights = {
            c.id: self._weights.get(c.id, self.weight_of(self._reference, 0.0))
            for c in ensemble.components
        }


class AccuracyWeighted(ChunkErrorRule):
    name = "awe"

    def weight_of(self, reference: float, error: float) -> float:
        return awe_weight(reference, error)


class AccuracyUpdated(ChunkErrorRule):
    name = "aue2"

    def __init__(self, epsilon: float = AUE2_EPSILON):
        super().__init__()
        if epsilon <= 0:
            raise DescriptorError(f"AUE2 epsilon must be positive, got {epsilon}")
        self.epsilon = epsilon

    def weight_of(self, reference: float, error: float) -> float:
        return aue2_weight(reference, error, self.epsilon)


class GooweWeighting(WeightingRule):
    """Least-squares weights over the instance window (or the latest chunk)"""

    name = "goowe"

    def __init__(self, source: WeightSource = WeightSource.WINDOW):
        self.source = source
        self._chunk_weights: dict[int, float] = {}
        self.last_weights: npt.NDArray[np.float64] | None = None

    def bind(self, ensemble: "BlockEnsemble") -> None:
        super().bind(ensemble)
        self._solver = WindowedWeightSolver(ensemble.config.window_capacity, self.n_classes)
        # a replacement-only rule solves over the chunk and never reads the window
        self._windowed = self.source is WeightSource.WINDOW and ensemble.vote_rule is self

    def weights(self, ensemble: "BlockEnsemble") -> npt.NDArray[np.float64]:
        if self.source is WeightSource.WINDOW:
            weights = self._solver.solve(ensemble.score_by_id).weights
        else:
            weights = np.array([self._chunk_weights.get(c.id, 0.0) for c in ensemble.components])
        self.last_weights = weights
        return weights

    def observe(
        self, ensemble: "BlockEnsemble", instance: Instance, scores: dict[int, ScoreVector]
    ) -> None:
        if self._windowed:
            self._solver.push(instance, scores)

    def select_victim(self, ensemble: "BlockEnsemble", chunk: list[Instance]) -> int:
        system = chunk_weight_system(
            ensemble.components, chunk, self.n_classes, ensemble.chunk_scores(chunk)
        )
        return least_weighted(solve_weights(system).weights)

    def components_changed(self, ensemble: "BlockEnsemble", chunk: list[Instance]) -> None:
        if self.source is WeightSource.WINDOW:
            if self._windowed:
                self._solver.set_components(ensemble.component_ids)
            return
        system = chunk_weight_system(ensemble.components, chunk, self.n_classes)
        solved = solve_weights(system).weights
        self._chunk_weights = {c.id: float(w) for c, w in zip(ensemble.components, solved)}


class GooweSingle(GooweWeighting):
    """Predicts with the one component whose |weight| is smallest (pick=argmin) or largest"""

    def __init__(
        self,
        pick: Callable[[npt.NDArray[np.float64]], np.intp],
        name: str,
        source: WeightSource = WeightSource.WINDOW,
    ):
        super().__init__(source)
        self.pick = pick
        self.name = name

    def predict(self, ensemble: "BlockEnsemble", scores: dict[int, ScoreVector]) -> Prediction:
        chosen = ensemble.components[int(self.pick(np.abs(self.weights(ensemble))))]
        return Prediction(scores[chosen.id], int(np.argmax(scores[chosen.id])))


RULE_SYNTAX = re.compile(r"^\s*([A-Za-z0-9_]+)\s*(?:\((.*)\))?\s*$")


def _floats(rule: RuleName, args: list[str], at_most: int) -> list[float]:
    if len(args) > at_most:
        raise DescriptorError(f"Rule {rule} takes at most {at_most} arguments, got {len(args)}")
    try:
        return [float(a) for a in args]
    except ValueError as e:
        raise DescriptorError(f"Rule {rule} takes numeric arguments: {args}") from e


def parse_rule(text: str) -> WeightingRule:
    """
    Build a weighting rule from its descriptor form

    Accepted forms: mv, dwm, dwm(beta), dwm(beta,theta), awe, aue2, aue2(epsilon),
    goowe, goowe(window|chunk), goowe_min, goowe_max (same optional source).

    Args:
        text (str): The rule descriptor

    Returns:
        WeightingRule: A fresh, unbound rule

    Raises:
        DescriptorError: On an unknown name or bad arguments
    """
    match = RULE_SYNTAX.match(text)
    if not match:
        raise DescriptorError(f"Malformed weighting rule: {text!r}")
    rule = RuleName.from_str(match.group(1))
    args = [a.strip() for a in (match.group(2) or "").split(",") if a.strip()]

    if rule is RuleName.MV:
        _floats(rule, args, 0)
        return MajorityVote()
    if rule is RuleName.DWM:
        return DynamicWeightedMajority(*_floats(rule, args, 2))
    if rule is RuleName.AWE:
        _floats(rule, args, 0)
        return AccuracyWeighted()
    if rule is RuleName.AUE2:
        return AccuracyUpdated(*_floats(rule, args, 1))

    if len(args) > 1:
        raise DescriptorError(f"Rule {rule} takes at most 1 argument, got {len(args)}")
    source = WeightSource.from_str(args[0]) if args else WeightSource.WINDOW
    if rule is RuleName.GOOWE:
        return GooweWeighting(source)
    if rule is RuleName.GOOWE_MIN:
        return GooweSingle(np.argmin, "goowe_min", source)
    return GooweSingle(np.argmax, "goowe_max", source)
