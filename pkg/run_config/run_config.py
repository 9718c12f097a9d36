import dataclasses
import hashlib
import json
import logging
import os
import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

from data_classes import DescriptorError, LeafPrediction

logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "GOOWE_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "results"
MEGABYTE = 1024 * 1024


class Algorithm(Enum):
    """Classifiers a run can evaluate"""

    GOOWE = "goowe"
    BASE1 = "base1"
    BASE2 = "base2"
    SINGLE = "single"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def from_str(cls, name: str) -> "Algorithm":
        """Convert a string to an Algorithm enum"""
        for member in cls:
            if member.value == name.lower():
                return member
        raise DescriptorError(
            f"Unknown algorithm: {name} (expected one of {', '.join(m.value for m in cls)})"
        )


class LearnerKind(Enum):
    """Base learners"""

    HOEFFDING_TREE = "hoeffding_tree"
    NAIVE_BAYES = "naive_bayes"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def from_str(cls, name: str) -> "LearnerKind":
        """Convert a string to a LearnerKind enum"""
        for member in cls:
            if member.value == name.lower():
                return member
        raise DescriptorError(
            f"Unknown learner: {name} (expected one of {', '.join(m.value for m in cls)})"
        )


def _check_keys(data: Any, cls: type, where: str) -> dict[str, Any]:
    if not isinstance(data, dict):
        raise DescriptorError(f"{where} must be an object, got {type(data).__name__}")
    known = {f.name for f in dataclasses.fields(cls) if f.init}
    unknown = sorted(set(data) - known)
    if unknown:
        raise DescriptorError(
            f"Unknown {where} keys: {', '.join(unknown)} (valid: {', '.join(sorted(known))})"
        )
    return data


def _positive(value: Any, name: str, allow_none: bool = False) -> Any:
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)) or value <= 0:
        raise DescriptorError(f"{name} must be a positive number, got {value!r}")
    return value


@dataclass(frozen=True)
class LearnerSpec:
    kind: LearnerKind = LearnerKind.HOEFFDING_TREE
    grace_period: int = 100
    split_confidence: float = 0.01
    tie_threshold: float = 0.05
    leaf_prediction: LeafPrediction = LeafPrediction.NAIVE_BAYES_ADAPTIVE

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": str(self.kind),
            "grace_period": self.grace_period,
            "split_confidence": self.split_confidence,
            "tie_threshold": self.tie_threshold,
            "leaf_prediction": str(self.leaf_prediction),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "LearnerSpec":
        data = _check_keys(data, cls, "learner")
        try:
            leaf = LeafPrediction.from_str(data.get("leaf_prediction", "naive_bayes_adaptive"))
        except ValueError as e:
            raise DescriptorError(str(e)) from e
        confidence = data.get("split_confidence", 0.01)
        if not isinstance(confidence, (int, float)) or not 0 < confidence < 1:
            raise DescriptorError(f"split_confidence must be in (0, 1), got {confidence!r}")
        return cls(
            kind=LearnerKind.from_str(data.get("kind", "hoeffding_tree")),
            grace_period=int(_positive(data.get("grace_period", 100), "grace_period")),
            split_confidence=float(confidence),
            tie_threshold=float(data.get("tie_threshold", 0.05)),
            leaf_prediction=leaf,
        )


@dataclass(frozen=True)
class EnsembleSpec:
    algorithm: Algorithm = Algorithm.GOOWE
    max_components: int = 10
    chunk_size: int = 500
    window_size: int = 500
    memory_limit_mb: float = 32.0
    # vote rule of base1, replacement rule of base2
    rule: str | None = None
    learner: LearnerSpec = field(default_factory=LearnerSpec)
    # overrides the derived label; needed when a suite holds two ensembles of one kind
    name: str | None = None

    @property
    def memory_limit_bytes(self) -> int:
        return int(self.memory_limit_mb * MEGABYTE)

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.algorithm in (Algorithm.BASE1, Algorithm.BASE2):
            return f"{self.algorithm}[{self.rule}]"
        if self.algorithm is Algorithm.SINGLE:
            return f"single[{self.learner.kind}]"
        return str(self.algorithm)

    def to_dict(self) -> dict[str, Any]:
        return {
            "algorithm": str(self.algorithm),
            "max_components": self.max_components,
            "chunk_size": self.chunk_size,
            "window_size": self.window_size,
            "memory_limit_mb": self.memory_limit_mb,
            "rule": self.rule,
            "learner": self.learner.to_dict(),
            "name": self.name,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "EnsembleSpec":
        data = _check_keys(data, cls, "ensemble")
        algorithm = Algorithm.from_str(data.get("algorithm", "goowe"))
        rule = data.get("rule")
        if algorithm in (Algorithm.BASE1, Algorithm.BASE2) and not rule:
            raise DescriptorError(f"Algorithm {algorithm} needs a weighting rule")
        if rule is not None and not isinstance(rule, str):
            raise DescriptorError(f"rule must be a string, got {rule!r}")
        return cls(
            algorithm=algorithm,
            max_components=int(_positive(data.get("max_components", 10), "max_components")),
            chunk_size=int(_positive(data.get("chunk_size", 500), "chunk_size")),
            window_size=int(_positive(data.get("window_size", 500), "window_size")),
            memory_limit_mb=float(_positive(data.get("memory_limit_mb", 32.0), "memory_limit_mb")),
            rule=rule,
            learner=LearnerSpec.from_dict(data.get("learner", {})),
            name=_name(data.get("name")),
        )


@dataclass(frozen=True)
class StreamSpec:
    generator: str | None = None
    path: str | None = None
    class_attribute: str | None = None
    length: int | None = None
    params: dict[str, Any] = field(default_factory=dict)
    name: str | None = None

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        return self.generator if self.generator else Path(self.path or "stream").stem

    def to_dict(self) -> dict[str, Any]:
        return {
            "generator": self.generator,
            "path": self.path,
            "class_attribute": self.class_attribute,
            "length": self.length,
            "params": dict(self.params),
            "name": self.name,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "StreamSpec":
        data = _check_keys(data, cls, "stream")
        generator, path = data.get("generator"), data.get("path")
        if bool(generator) == bool(path):
            raise DescriptorError("A stream needs exactly one of 'generator' or 'path'")
        params = data.get("params", {})
        if not isinstance(params, dict):
            raise DescriptorError(f"stream params must be an object, got {params!r}")
        length = _positive(data.get("length"), "length", allow_none=True)
        return cls(
            generator=generator,
            path=path,
            class_attribute=data.get("class_attribute"),
            length=int(length) if length is not None else None,
            params=params,
            name=_name(data.get("name")),
        )


@dataclass(frozen=True)
class EvaluationSpec:
    report_interval: int = 500
    max_instances: int | None = None

    def to_dict(self) -> dict[str, Any]:
        return {"report_interval": self.report_interval, "max_instances": self.max_instances}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "EvaluationSpec":
        data = _check_keys(data, cls, "evaluation")
        cap = _positive(data.get("max_instances"), "max_instances", allow_none=True)
        return cls(
            report_interval=int(_positive(data.get("report_interval", 500), "report_interval")),
            max_instances=int(cap) if cap is not None else None,
        )


def _name(value: Any) -> str | None:
    if value is None:
        return None
    if not isinstance(value, str) or not value.strip():
        raise DescriptorError(f"name must be a non-empty string, got {value!r}")
    return value


def _require_distinct(labels: list[str], what: str) -> None:
    duplicates = sorted(label for label, count in Counter(labels).items() if count > 1)
    if duplicates:
        raise DescriptorError(
            f"{what} must be distinct, repeated: {', '.join(duplicates)} "
            "(give each entry its own 'name')"
        )


def _seed(value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or not 0 <= value < 2**64:
        raise DescriptorError(f"seed must be an unsigned 64-bit integer, got {value!r}")
    return value


def hash_config(data: dict[str, Any]) -> str:
    """SHA-256 of the canonical JSON form"""
    canonical = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


@dataclass(frozen=True)
class RunDescriptor:
    """Everything that determines one run's outputs"""

    stream: StreamSpec
    ensemble: EnsembleSpec = field(default_factory=EnsembleSpec)
    evaluation: EvaluationSpec = field(default_factory=EvaluationSpec)
    seed: int = 1
    output_dir: str | None = None

    @property
    def run_id(self) -> str:
        raw = f"{self.ensemble.label}__{self.stream.label}__s{self.seed}"
        return re.sub(r"[^A-Za-z0-9_.\-]+", "_", raw).strip("_")

    def to_dict(self) -> dict[str, Any]:
        """Canonical form; output_dir does not influence results and is left out"""
        return {
            "stream": self.stream.to_dict(),
            "ensemble": self.ensemble.to_dict(),
            "evaluation": self.evaluation.to_dict(),
            "seed": self.seed,
        }

    def config_hash(self) -> str:
        return hash_config(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunDescriptor":
        data = _check_keys(data, cls, "run descriptor")
        if "stream" not in data:
            raise DescriptorError("Run descriptor has no stream")
        return cls(
            stream=StreamSpec.from_dict(data["stream"]),
            ensemble=EnsembleSpec.from_dict(data.get("ensemble", {})),
            evaluation=EvaluationSpec.from_dict(data.get("evaluation", {})),
            seed=_seed(data.get("seed", 1)),
            output_dir=data.get("output_dir"),
        )


@dataclass(frozen=True)
class SuiteDescriptor:
    """Ensembles × streams × seeds"""

    ensembles: tuple[EnsembleSpec, ...]
    streams: tuple[StreamSpec, ...]
    seeds: tuple[int, ...] = (1,)
    evaluation: EvaluationSpec = field(default_factory=EvaluationSpec)
    output_dir: str | None = None
    workers: int | None = None

    def runs(self) -> list[RunDescriptor]:
        """One descriptor per cell, ordered by stream, ensemble, seed"""
        return [
            RunDescriptor(stream=s, ensemble=e, evaluation=self.evaluation, seed=seed)
            for s in self.streams
            for e in self.ensembles
            for seed in self.seeds
        ]

    def to_dict(self) -> dict[str, Any]:
        return {
            "ensembles": [e.to_dict() for e in self.ensembles],
            "streams": [s.to_dict() for s in self.streams],
            "seeds": list(self.seeds),
            "evaluation": self.evaluation.to_dict(),
        }

    def config_hash(self) -> str:
        return hash_config(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SuiteDescriptor":
        data = _check_keys(data, cls, "suite descriptor")
        ensembles = data.get("ensembles") or []
        streams = data.get("streams") or []
        seeds = data.get("seeds", [1])
        if not ensembles or not streams or not seeds:
            raise DescriptorError("A suite needs at least one ensemble, stream and seed")
        workers = data.get("workers")
        suite = cls(
            ensembles=tuple(EnsembleSpec.from_dict(e) for e in ensembles),
            streams=tuple(StreamSpec.from_dict(s) for s in streams),
            seeds=tuple(_seed(s) for s in seeds),
            evaluation=EvaluationSpec.from_dict(data.get("evaluation", {})),
            output_dir=data.get("output_dir"),
            workers=int(_positive(workers, "workers")) if workers is not None else None,
        )
        # every cell needs its own files and matrix entry
        _require_distinct([e.label for e in suite.ensembles], "Ensemble labels")
        _require_distinct([s.label for s in suite.streams], "Stream labels")
        _require_distinct([r.run_id for r in suite.runs()], "Run ids")
        return suite


def load_descriptor(path: str | Path) -> dict[str, Any]:
    """Read a JSON descriptor file"""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Descriptor not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise DescriptorError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise DescriptorError(f"{path}: a descriptor must be a JSON object")
    return data


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(data: dict[str, Any], assignments: list[str] | tuple[str, ...]) -> dict[str, Any]:
    """
    Set nested descriptor keys from key.path=value assignments

    Values are parsed as JSON when possible, otherwise kept as strings.

    Args:
        data (dict): The raw descriptor
        assignments (list[str]): e.g. ["ensemble.max_components=5", "stream.params.noise_percentage=0.2"]

    Returns:
        dict: A new descriptor with the assignments applied
    """
    result = json.loads(json.dumps(data))
    for assignment in assignments:
        key, sep, value = assignment.partition("=")
        if not sep or not key.strip():
            raise DescriptorError(f"Override must look like key.path=value, got {assignment!r}")
        *parents, leaf = key.strip().split(".")
        node = result
        for part in parents:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise DescriptorError(f"Cannot set {key}: {part} is not an object")
            node = child
        node[leaf] = _parse_value(value)
    return result


def resolve_output_dir(cli_value: str | None, descriptor_value: str | None) -> Path:
    """CLI flag, then descriptor, then GOOWE_OUTPUT_DIR, then ./results"""
    chosen = cli_value or descriptor_value or os.environ.get(OUTPUT_DIR_ENV) or DEFAULT_OUTPUT_DIR
    logger.debug(f"Output directory: {chosen}")
    return Path(chosen)
