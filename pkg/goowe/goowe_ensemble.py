import itertools
import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
import numpy.typing as npt

from data_classes import (
    DataChunk,
    IncrementalClassifier,
    Instance,
    Prediction,
    ScoreVector,
    StreamSchema,
    normalize_scores,
    uniform_scores,
)

from .weight_system import (
    WeightSolution,
    WeightSystem,
    WindowedWeightSolver,
    accumulate_system,
    aggregate_votes,
    solve_weights,
)

logger = logging.getLogger(__name__)

# Fixed bookkeeping charged to an ensemble on top of its components
ENSEMBLE_OVERHEAD_BYTES = 1024
MEGABYTE = 1024 * 1024

LearnerFactory = Callable[[], IncrementalClassifier]


@dataclass(frozen=True)
class GooweConfig:
    """Ensemble sizing; defaults follow the usual stream-mining setup"""

    max_components: int = 10
    chunk_size: int = 500
    window_size: int = 500
    memory_limit_bytes: int = 32 * MEGABYTE

    def __post_init__(self) -> None:
        for name in ("max_components", "chunk_size", "window_size", "memory_limit_bytes"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    @property
    def window_capacity(self) -> int:
        return max(self.window_size, self.chunk_size)


@dataclass
class Component:
    id: int
    learner: IncrementalClassifier


def component_scores(
    learner: IncrementalClassifier, features: npt.NDArray[np.float64], n_classes: int
) -> ScoreVector:
    return normalize_scores(learner.score(features), n_classes)


def chunk_weight_system(
    components: list[Component],
    chunk: list[Instance],
    n_classes: int,
    scores: list[dict[int, ScoreVector]] | None = None,
) -> WeightSystem:
    """
    Weight system over the instances of one chunk, scored by the given components

    Args:
        components (list[Component]): Row and column order of the system
        chunk (list[Instance]): The chunk
        n_classes (int): The class count p
        scores (list[dict] | None): Normalized scores per instance and component id, when already known

    Returns:
        WeightSystem: A and d summed over the chunk
    """
    if scores is None:
        scores = [
            {c.id: component_scores(c.learner, x.features, n_classes) for c in components}
            for x in chunk
        ]
    return accumulate_system(
        (
            (np.vstack([by_id[c.id] for c in components]), x.label)
            for by_id, x in zip(scores, chunk)
        ),
        len(components),
        n_classes,
    )


def least_weighted(weights: npt.NDArray[np.float64]) -> int:
    """Index of min |w|; np.argmin returns the first, so ties go to the lowest index"""
    return int(np.argmin(np.abs(weights)))


class ChunkEnsemble:
    """
    Chunk-based component lifecycle shared by every ensemble here.

    Each closed chunk trains a new candidate. When the ensemble is full a
    victim is dropped first, the survivors then learn the chunk, and the
    candidate joins. Subclasses decide how votes are weighted and who the
    victim is.
    """

    name = "chunk_ensemble"

    def __init__(
        self,
        schema: StreamSchema,
        learner_factory: LearnerFactory,
        config: GooweConfig = GooweConfig(),
    ):
        self.schema = schema
        self.n_classes = schema.n_classes
        self.learner_factory = learner_factory
        self.config = config

        self.components: list[Component] = []
        self.chunk = DataChunk(config.chunk_size)
        # scores each instance of the open chunk was predicted with
        self._chunk_scores: list[tuple[Instance, dict[int, ScoreVector]]] = []
        self._ids = itertools.count()

        self.chunks_trained = 0
        self.replacements = 0
        self.prune_events = 0
        # component ids after each chunk
        self.training_log: list[tuple[int, ...]] = []

    @property
    def component_ids(self) -> list[int]:
        return [c.id for c in self.components]

    def score_by_id(self, component_id: int, instance: Instance) -> ScoreVector:
        learner = next(c.learner for c in self.components if c.id == component_id)
        return component_scores(learner, instance.features, self.n_classes)

    def score_components(self, features: npt.NDArray[np.float64]) -> dict[int, ScoreVector]:
        return {
            c.id: component_scores(c.learner, features, self.n_classes)
            for c in self.components
        }

    def chunk_scores(self, chunk: list[Instance]) -> list[dict[int, ScoreVector]]:
        """Component scores on a closed chunk, reused from prediction time when the components are unchanged"""
        cached = self._chunk_scores
        if len(cached) == len(chunk) and all(seen is x for (seen, _), x in zip(cached, chunk)):
            return [scores for _, scores in cached]
        return [self.score_components(x.features) for x in chunk]

    def predict(self, scores: dict[int, ScoreVector]) -> Prediction:
        raise NotImplementedError

    def observe(self, instance: Instance, scores: dict[int, ScoreVector]) -> None:
        """Hook: a labeled instance after its prediction"""

    def before_replacement(self, chunk: list[Instance]) -> None:
        """Hook: a closed chunk, before any component changes"""

    def select_victim(self, chunk: list[Instance]) -> int:
        raise NotImplementedError

    def components_changed(self, chunk: list[Instance]) -> None:
        """Hook: the candidate has joined"""

    def process_instance(self, instance: Instance) -> Prediction:
        """
        Predict on an instance, then learn from it

        The prediction only uses what the ensemble knew before this instance.
        Afterwards the instance is observed and enters the chunk; a full chunk
        trains the ensemble, and crossing the memory limit prunes every
        component.

        Args:
            instance (Instance): The next labeled instance

        Returns:
            Prediction: The aggregated score vector and its argmax

        Raises:
            SchemaError: If the instance does not fit the schema
        """
        self.schema.check_instance(instance)

        scores = self.score_components(instance.features)
        prediction = (
            self.predict(scores)
            if self.components
            else Prediction(uniform_scores(self.n_classes), 0)
        )

        self.observe(instance, scores)
        self._chunk_scores.append((instance, scores))
        chunk = self.chunk.push(instance)
        if chunk is not None:
            self.train_on_chunk(chunk)
            self._chunk_scores = []

        if self.memory_estimate() >= self.config.memory_limit_bytes:
            self.prune_all()

        return prediction

    def train_on_chunk(self, chunk: list[Instance]) -> None:
        """
        Train a candidate on a full chunk and make room for it

        Args:
            chunk (list[Instance]): The h instances of the closed chunk
        """
        candidate = self.learner_factory()
        for instance in chunk:
            candidate.train_on(instance)

        self.before_replacement(chunk)
        if len(self.components) >= self.config.max_components:
            removed = self.components.pop(self.select_victim(chunk))
            self.replacements += 1
            logger.debug(f"{self.name}: removed component {removed.id}")

        for component in self.components:
            for instance in chunk:
                component.learner.train_on(instance)

        self.components.append(Component(next(self._ids), candidate))
        self.chunks_trained += 1
        self.training_log.append(tuple(self.component_ids))
        self.components_changed(chunk)
        logger.debug(
            f"{self.name}: chunk {self.chunks_trained} trained, components {self.component_ids}"
        )

    def memory_estimate(self) -> int:
        return ENSEMBLE_OVERHEAD_BYTES + sum(
            c.learner.memory_estimate() for c in self.components
        )

    def prune_all(self) -> None:
        """Ask every component to shrink to an equal share of the memory limit"""
        if not self.components:
            return
        before = self.memory_estimate()
        share = max(
            0, (self.config.memory_limit_bytes - ENSEMBLE_OVERHEAD_BYTES) // len(self.components)
        )
        for component in self.components:
            component.learner.prune(share)
        self.prune_events += 1
        after = self.memory_estimate()
        if after < before:
            # deactivated leaves score differently from here on
            self._chunk_scores = []
            logger.warning(
                f"{self.name}: memory limit reached, pruned components from {before} to "
                f"{after} bytes (share {share} each)"
            )
        else:
            logger.debug(f"{self.name}: nothing left to prune at {after} bytes")


class GooweEnsemble(ChunkEnsemble):
    """
    Votes are weighted by the least-squares weights over a sliding window of
    the latest instances; replacement drops the component with the smallest
    |weight| on the closing chunk.
    """

    name = "goowe"

    def __init__(
        self,
        schema: StreamSchema,
        learner_factory: LearnerFactory,
        config: GooweConfig = GooweConfig(),
    ):
        """
        Initialize an empty ensemble

        Args:
            schema (StreamSchema): The stream schema
            learner_factory (Callable): Builds a fresh, untrained component
            config (GooweConfig): Ensemble size, chunk and window lengths, memory limit
        """
        super().__init__(schema, learner_factory, config)
        self.solver = WindowedWeightSolver(config.window_capacity, self.n_classes)
        self.last_solution: WeightSolution | None = None
        self.fallbacks = 0

    def solve(self) -> WeightSolution:
        """Component weights over the current window (rebuilding after churn)"""
        solution = self.solver.solve(self.score_by_id)
        if solution.fallback and len(self.solver.window):
            self.fallbacks += 1
        self.last_solution = solution
        return solution

    def predict(self, scores: dict[int, ScoreVector]) -> Prediction:
        solution = self.solve()
        stacked = np.vstack([scores[c.id] for c in self.components])
        aggregated = aggregate_votes(stacked, solution.weights)
        return Prediction(aggregated, int(np.argmax(aggregated)))

    def observe(self, instance: Instance, scores: dict[int, ScoreVector]) -> None:
        self.solver.push(instance, scores)

    def select_victim(self, chunk: list[Instance]) -> int:
        system = chunk_weight_system(self.components, chunk, self.n_classes, self.chunk_scores(chunk))
        weights = solve_weights(system).weights
        logger.debug(f"Chunk weights {np.round(weights, 4)}")
        return least_weighted(weights)

    def components_changed(self, chunk: list[Instance]) -> None:
        self.solver.set_components(self.component_ids)
