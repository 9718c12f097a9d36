import logging
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import pandas as pd

from data_classes import (
    EmptyInputError,
    IncrementalClassifier,
    Instance,
    Prediction,
    SchemaError,
    StreamClassifier,
    StreamSchema,
    StreamSource,
    normalize_scores,
)

logger = logging.getLogger(__name__)

MEGABYTE = 1024 * 1024
DEFAULT_REPORT_INTERVAL = 500

TRACE_COLUMNS = ["chunk_index", "instances", "accuracy", "cumulative_accuracy", "memory_mb"]
TIMING_COLUMNS = ["chunk_index", "instances", "cs_per_1000"]


@dataclass(frozen=True)
class ChunkRecord:
    """Evaluation of one report interval"""

    chunk_index: int
    # instances tested so far, including this chunk
    instances: int
    accuracy: float
    cumulative_accuracy: float
    cs_per_1000: float
    memory_mb: float


@dataclass
class RunTrace:
    """Per-chunk records and aggregates of one prequential run"""

    ensemble: str
    stream: str
    seed: int | None = None
    run_id: str = ""
    records: list[ChunkRecord] = field(default_factory=list)
    correct: int = 0
    instances: int = 0
    blips: int = 0
    elapsed_seconds: float = 0.0
    prune_events: int = 0

    @property
    def accuracy(self) -> float:
        """Aggregate accuracy in percent over every tested instance"""
        return 100.0 * self.correct / self.instances if self.instances else 0.0

    @property
    def cs_per_1000(self) -> float:
        return time_sample(self.elapsed_seconds, self.instances)

    @property
    def mean_memory_mb(self) -> float:
        if not self.records:
            return 0.0
        return float(np.mean([r.memory_mb for r in self.records]))

    def to_frame(self) -> pd.DataFrame:
        """Deterministic per-chunk columns (no timings)"""
        return pd.DataFrame(
            [[getattr(r, c) for c in TRACE_COLUMNS] for r in self.records],
            columns=TRACE_COLUMNS,
        )

    def timing_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [[getattr(r, c) for c in TIMING_COLUMNS] for r in self.records],
            columns=TIMING_COLUMNS,
        )

    def summary(self) -> dict[str, Any]:
        return {
            "run_id": self.run_id,
            "ensemble": self.ensemble,
            "stream": self.stream,
            "seed": self.seed,
            "instances": self.instances,
            "correct": self.correct,
            "accuracy": self.accuracy,
            "mean_memory_mb": self.mean_memory_mb,
            "blips": self.blips,
            "prune_events": self.prune_events,
            "chunks": len(self.records),
        }


def memory_sample(classifier: StreamClassifier) -> float:
    """The classifier's model-size estimate in MB"""
    return classifier.memory_estimate() / MEGABYTE


def time_sample(elapsed_seconds: float, n_instances: int) -> float:
    """Centiseconds per 1,000 instances"""
    if n_instances <= 0:
        return 0.0
    return max(0.0, elapsed_seconds) * 100.0 * 1000.0 / n_instances


class SingleLearner:
    """Runs one incremental learner through the prequential harness"""

    def __init__(self, schema: StreamSchema, learner: IncrementalClassifier, name: str = "single"):
        self.schema = schema
        self.learner = learner
        self.name = name

    def process_instance(self, instance: Instance) -> Prediction:
        self.schema.check_instance(instance)
        scores = normalize_scores(self.learner.score(instance.features), self.schema.n_classes)
        prediction = Prediction(scores, int(np.argmax(scores)))
        self.learner.train_on(instance)
        return prediction

    def memory_estimate(self) -> int:
        return self.learner.memory_estimate()


def test_then_train(
    classifier: StreamClassifier,
    stream: StreamSource,
    report_interval: int = DEFAULT_REPORT_INTERVAL,
    max_instances: int | None = None,
    seed: int | None = None,
    run_id: str = "",
) -> RunTrace:
    """
    Interleaved test-then-train evaluation

    Every instance is predicted on before the classifier sees its label.
    A record is emitted each report_interval instances and for a final
    partial interval.

    Args:
        classifier (StreamClassifier): The ensemble or learner under test
        stream (StreamSource): The instance source
        report_interval (int): Instances per trace record
        max_instances (int | None): Stop after this many instances
        seed (int | None): Recorded in the trace
        run_id (str): Recorded in the trace

    Returns:
        RunTrace: The per-chunk trace and aggregates

    Raises:
        SchemaError: If the classifier was built for another schema
        EmptyInputError: If the stream yields no instance
    """
    if report_interval < 1:
        raise ValueError(f"Report interval must be positive, got {report_interval}")
    schema = stream.schema()
    classifier_schema = getattr(classifier, "schema", None)
    if classifier_schema is not None and not classifier_schema.is_compatible(schema):
        raise SchemaError(
            f"Classifier schema {classifier_schema.name} does not match stream {schema.name}"
        )

    trace = RunTrace(ensemble=classifier.name, stream=schema.name, seed=seed, run_id=run_id)
    chunk_correct = 0
    chunk_instances = 0
    chunk_seconds = 0.0

    def close_chunk() -> None:
        trace.records.append(
            ChunkRecord(
                chunk_index=len(trace.records),
                instances=trace.instances,
                accuracy=100.0 * chunk_correct / chunk_instances,
                cumulative_accuracy=trace.accuracy,
                cs_per_1000=time_sample(chunk_seconds, chunk_instances),
                memory_mb=memory_sample(classifier),
            )
        )

    logger.info(f"Evaluating {classifier.name} on {schema.name} (seed {seed})")
    while max_instances is None or trace.instances < max_instances:
        instance = stream.next_instance()
        if instance is None:
            break

        started = time.perf_counter()
        prediction = classifier.process_instance(instance)
        chunk_seconds += time.perf_counter() - started

        hit = int(prediction.label == instance.label)
        trace.correct += hit
        trace.instances += 1
        trace.blips += int(instance.is_blip)
        chunk_correct += hit
        chunk_instances += 1

        if chunk_instances == report_interval:
            close_chunk()
            trace.elapsed_seconds += chunk_seconds
            chunk_correct = chunk_instances = 0
            chunk_seconds = 0.0

    if trace.instances == 0:
        raise EmptyInputError(f"Stream {schema.name} yielded no instances")
    if chunk_instances:
        close_chunk()
        trace.elapsed_seconds += chunk_seconds

    trace.prune_events = getattr(classifier, "prune_events", 0)
    logger.info(
        f"{classifier.name} on {schema.name}: {trace.accuracy:.3f}% over "
        f"{trace.instances} instances"
    )
    return trace
