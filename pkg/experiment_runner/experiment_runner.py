import functools
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from baselines import base1, base2
from data_classes import (
    GooweError,
    IncrementalClassifier,
    StreamClassifier,
    StreamSchema,
)
from evaluation import RunTrace, SingleLearner
from evaluation import test_then_train as evaluate_prequentially
from goowe import GooweConfig, GooweEnsemble, LearnerFactory
from learners import HoeffdingTree, NaiveBayesModel
from report_builder import ReportBuilder
from run_config import (
    Algorithm,
    EnsembleSpec,
    LearnerKind,
    LearnerSpec,
    RunDescriptor,
    StreamSpec,
    SuiteDescriptor,
    hash_config,
)
from streams import BaseStream, build_stream, open_stream_file, write_sidecar

logger = logging.getLogger(__name__)

MATRICES = {"accuracy": "accuracy", "time": "cs_per_1000", "memory": "mean_memory_mb"}


def _build_learner(spec: LearnerSpec, schema: StreamSchema) -> IncrementalClassifier:
    if spec.kind is LearnerKind.NAIVE_BAYES:
        return NaiveBayesModel(schema)
    return HoeffdingTree(
        schema,
        grace_period=spec.grace_period,
        split_confidence=spec.split_confidence,
        tie_threshold=spec.tie_threshold,
        leaf_prediction=spec.leaf_prediction,
    )


@dataclass
class CellResult:
    run_id: str
    stream: str
    ensemble: str
    seed: int
    summary: dict[str, Any] | None = None
    error: str | None = None
    resumed: bool = False


@dataclass
class CompareResult:
    cells: list[CellResult]
    matrices: dict[str, pd.DataFrame] = field(default_factory=dict)

    @property
    def failures(self) -> list[CellResult]:
        return [c for c in self.cells if c.error is not None]


def _run_cell(descriptor_data: dict[str, Any], output_dir: str, resume: bool) -> CellResult:
    """One suite cell; top-level so worker processes can unpickle it"""
    descriptor = RunDescriptor.from_dict(descriptor_data)
    cell = CellResult(
        run_id=descriptor.run_id,
        stream=descriptor.stream.label,
        ensemble=descriptor.ensemble.label,
        seed=descriptor.seed,
    )
    builder = ReportBuilder(output_dir)
    if resume:
        previous = builder.load_summary(descriptor.run_id)
        if previous is not None and previous.get("config_hash") == descriptor.config_hash():
            logger.info(f"Resuming {descriptor.run_id} from its summary")
            cell.summary = previous
            cell.resumed = True
            return cell
    try:
        cell.summary = ExperimentRunner.run_to_disk(descriptor, Path(output_dir))
    except (GooweError, ValueError, OSError) as e:
        logger.warning(f"Run {descriptor.run_id} failed: {e}")
        cell.error = str(e)
    return cell


class ExperimentRunner:
    """Builds classifiers and streams from descriptors and runs them"""

    @staticmethod
    def learner_factory(spec: LearnerSpec, schema: StreamSchema) -> LearnerFactory:
        """A zero-argument factory of fresh base learners"""
        return functools.partial(_build_learner, spec, schema)

    @staticmethod
    def build_stream(spec: StreamSpec, seed: int) -> BaseStream:
        if spec.path:
            return open_stream_file(spec.path, spec.class_attribute, spec.length)
        return build_stream(spec.generator or "", seed, spec.length, spec.params)

    @staticmethod
    def build_classifier(spec: EnsembleSpec, schema: StreamSchema) -> StreamClassifier:
        """
        Build the classifier a descriptor names

        Args:
            spec (EnsembleSpec): Algorithm, sizing, rule and base learner
            schema (StreamSchema): Schema of the stream it will see

        Returns:
            StreamClassifier: A fresh classifier
        """
        factory = ExperimentRunner.learner_factory(spec.learner, schema)
        if spec.algorithm is Algorithm.SINGLE:
            return SingleLearner(schema, factory(), name=spec.label)

        config = GooweConfig(
            max_components=spec.max_components,
            chunk_size=spec.chunk_size,
            window_size=spec.window_size,
            memory_limit_bytes=spec.memory_limit_bytes,
        )
        if spec.algorithm is Algorithm.BASE1:
            return base1(schema, factory, spec.rule or "", config)
        if spec.algorithm is Algorithm.BASE2:
            return base2(schema, factory, spec.rule or "", config)
        return GooweEnsemble(schema, factory, config)

    @staticmethod
    def run(descriptor: RunDescriptor) -> RunTrace:
        stream = ExperimentRunner.build_stream(descriptor.stream, descriptor.seed)
        classifier = ExperimentRunner.build_classifier(descriptor.ensemble, stream.schema())
        return evaluate_prequentially(
            classifier,
            stream,
            report_interval=descriptor.evaluation.report_interval,
            max_instances=descriptor.evaluation.max_instances,
            seed=descriptor.seed,
            run_id=descriptor.run_id,
        )

    @staticmethod
    def run_to_disk(descriptor: RunDescriptor, output_dir: Path) -> dict[str, Any]:
        """Run and write trace, timing and summary files; returns the summary"""
        started = time.perf_counter()
        trace = ExperimentRunner.run(descriptor)
        return ReportBuilder(output_dir).write_run(
            descriptor.run_id,
            trace,
            descriptor.to_dict(),
            descriptor.config_hash(),
            time.perf_counter() - started,
        )

    @staticmethod
    def generate(spec: StreamSpec, seed: int, count: int, out_path: Path) -> Path:
        """
        Write `count` instances of a stream as a headerless CSV plus schema sidecar

        Nominal values are written as their declared names, classes as class names.

        Args:
            spec (StreamSpec): The stream to materialize
            seed (int): Its seed
            count (int): Instances to write (0 writes an empty file)
            out_path (Path): Target CSV file

        Returns:
            Path: The CSV file
        """
        if count < 0:
            raise ValueError(f"Instance count must be non-negative, got {count}")
        stream = ExperimentRunner.build_stream(spec, seed)
        schema = stream.schema()
        rows = []
        for _ in range(count):
            instance = stream.next_instance()
            if instance is None:
                break
            row: list[Any] = [
                a.values[int(v)] if a.is_nominal else float(v)
                for a, v in zip(schema.attributes, instance.features)
            ]
            row.append(schema.class_names[instance.label])
            rows.append(row)

        out_path.parent.mkdir(parents=True, exist_ok=True)
        frame = pd.DataFrame(rows, columns=[a.name for a in schema.attributes] + ["class"])
        frame.to_csv(out_path, header=False, index=False, float_format="%.17g", lineterminator="\n")
        provenance = {"seed": seed, "stream": spec.to_dict(), "count": count}
        write_sidecar(out_path, schema, {**provenance, "config_hash": hash_config(provenance)})
        logger.info(f"Wrote {len(rows)} instances of {schema.name} to {out_path}")
        return out_path

    @staticmethod
    def default_workers() -> int:
        return max(1, (os.cpu_count() or 1) - 1)

    @staticmethod
    def compare(
        suite: SuiteDescriptor,
        output_dir: Path,
        resume: bool = False,
        workers: int | None = None,
    ) -> CompareResult:
        """
        Run every cell of a suite and reduce them into result matrices

        Cells run in worker processes; results are reduced in suite order, so
        the matrices do not depend on completion order.

        Args:
            suite (SuiteDescriptor): Ensembles × streams × seeds
            output_dir (Path): Directory of every run's files and the matrices
            resume (bool): Reuse cells whose summary carries the same config hash
            workers (int | None): Parallel runs, cores - 1 by default

        Returns:
            CompareResult: Per-cell results and the accuracy, time and memory matrices
        """
        runs = suite.runs()
        workers = workers or suite.workers or ExperimentRunner.default_workers()
        logger.info(f"Running {len(runs)} cells with {workers} worker(s)")

        payloads = [(r.to_dict(), str(output_dir), resume) for r in runs]
        if workers == 1:
            cells = [_run_cell(*p) for p in payloads]
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(_run_cell, *p) for p in payloads]
                cells = [f.result() for f in futures]

        result = CompareResult(cells)
        streams = [s.label for s in suite.streams]
        ensembles = [e.label for e in suite.ensembles]
        builder = ReportBuilder(output_dir)
        suite_hash = suite.config_hash()
        for name, key in MATRICES.items():
            frame = ExperimentRunner.matrix(cells, streams, ensembles, key)
            result.matrices[name] = frame
            builder.write_matrix(frame, name, suite_hash)

        builder.write_json(
            {
                "config_hash": suite_hash,
                "cells": len(cells),
                "resumed": sum(c.resumed for c in cells),
                "failures": {c.run_id: c.error for c in result.failures},
            },
            "suite.json",
        )
        if result.failures:
            logger.error(f"{len(result.failures)} of {len(cells)} runs failed")
        return result

    @staticmethod
    def matrix(
        cells: list[CellResult], streams: list[str], ensembles: list[str], key: str
    ) -> pd.DataFrame:
        """Mean of `key` over seeds per (stream, ensemble); failed cells leave NaN"""
        frame = pd.DataFrame(np.nan, index=pd.Index(streams), columns=pd.Index(ensembles))
        for stream in streams:
            for ensemble in ensembles:
                group = [c for c in cells if c.stream == stream and c.ensemble == ensemble]
                if group and all(c.summary is not None for c in group):
                    frame.loc[stream, ensemble] = float(
                        np.mean([c.summary[key] for c in group if c.summary is not None])
                    )
        return frame
