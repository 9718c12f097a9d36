import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator, Protocol, runtime_checkable

import numpy as np
import numpy.typing as npt

from .exceptions import InvalidScoreError, SchemaError

# Per-class relevance scores of one component for one instance (length p)
ScoreVector = npt.NDArray[np.float64]


class AttributeKind(Enum):
    """Kind of an attribute value in a stream"""

    NUMERIC = "numeric"
    NOMINAL = "nominal"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def from_str(cls, kind: str) -> "AttributeKind":
        """Convert a string to an AttributeKind enum"""
        for member in cls:
            if member.value == kind.lower():
                return member
        raise SchemaError(
            f"Invalid attribute kind: {kind} (expected one of "
            f"{', '.join(m.value for m in cls)})"
        )


class LeafPrediction(Enum):
    """How a Hoeffding tree leaf turns its statistics into scores"""

    MAJORITY_CLASS = "majority_class"
    NAIVE_BAYES = "naive_bayes"
    NAIVE_BAYES_ADAPTIVE = "naive_bayes_adaptive"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def from_str(cls, mode: str) -> "LeafPrediction":
        """Convert a string to a LeafPrediction enum"""
        for member in cls:
            if member.value == mode.lower():
                return member
        raise ValueError(
            f"Invalid leaf prediction: {mode} (expected one of "
            f"{', '.join(m.value for m in cls)})"
        )


@dataclass(frozen=True)
class Attribute:
    """Describes one attribute of a stream"""

    name: str
    kind: AttributeKind
    values: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind is AttributeKind.NOMINAL and len(self.values) < 1:
            raise SchemaError(f"Nominal attribute {self.name} declares no values")

    @property
    def cardinality(self) -> int:
        return len(self.values)

    @property
    def is_nominal(self) -> bool:
        return self.kind is AttributeKind.NOMINAL

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"name": self.name, "kind": self.kind.value}
        if self.is_nominal:
            out["values"] = list(self.values)
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Attribute":
        kind = AttributeKind.from_str(data.get("kind", "numeric"))
        return cls(
            name=str(data["name"]),
            kind=kind,
            values=tuple(str(v) for v in data.get("values", ())),
        )

    @classmethod
    def numeric(cls, name: str) -> "Attribute":
        return cls(name, AttributeKind.NUMERIC)

    @classmethod
    def nominal(cls, name: str, values: list[str] | tuple[str, ...]) -> "Attribute":
        return cls(name, AttributeKind.NOMINAL, tuple(values))


@dataclass(frozen=True)
class StreamSchema:
    """Attribute descriptors and class labels of a stream"""

    attributes: tuple[Attribute, ...]
    class_names: tuple[str, ...]
    name: str = "stream"

    # derived lookups, filled in __post_init__
    numeric_index: npt.NDArray[np.intp] = field(init=False, repr=False, compare=False)
    nominal_index: npt.NDArray[np.intp] = field(init=False, repr=False, compare=False)
    cardinalities: npt.NDArray[np.int64] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.class_names) < 2:
            raise SchemaError(
                f"A stream needs at least 2 classes, got {len(self.class_names)}"
            )
        if len(self.attributes) < 1:
            raise SchemaError("A stream needs at least 1 attribute")

        numeric = [i for i, a in enumerate(self.attributes) if not a.is_nominal]
        nominal = [i for i, a in enumerate(self.attributes) if a.is_nominal]
        object.__setattr__(self, "numeric_index", np.array(numeric, dtype=np.intp))
        object.__setattr__(self, "nominal_index", np.array(nominal, dtype=np.intp))
        object.__setattr__(
            self,
            "cardinalities",
            np.array([self.attributes[i].cardinality for i in nominal], dtype=np.int64),
        )

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    @property
    def n_attributes(self) -> int:
        return len(self.attributes)

    def check_features(self, features: npt.NDArray[np.float64]) -> None:
        """
        Validate a feature vector against the schema

        Args:
            features (ndarray): The feature vector, nominal values as category indices

        Raises:
            SchemaError: On length mismatch, non-finite values or out-of-range categories
        """
        if features.shape != (self.n_attributes,):
            raise SchemaError(
                f"Expected {self.n_attributes} attributes, got {features.shape}"
            )
        if not np.all(np.isfinite(features)):
            raise SchemaError("Feature vector holds NaN or infinite values")
        if self.nominal_index.size:
            categories = features[self.nominal_index]
            if np.any(categories < 0) or np.any(categories >= self.cardinalities):
                raise SchemaError(
                    f"Nominal value out of range: {categories} vs cardinalities "
                    f"{self.cardinalities}"
                )

    def check_instance(self, instance: "Instance") -> None:
        """Validate an instance (features and label) against the schema"""
        self.check_features(instance.features)
        if not 0 <= instance.label < self.n_classes:
            raise SchemaError(
                f"Label {instance.label} outside [0, {self.n_classes})"
            )

    def is_compatible(self, other: "StreamSchema") -> bool:
        """Same attribute layout and class count"""
        return (
            self.n_classes == other.n_classes
            and self.attributes == other.attributes
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "attributes": [a.to_dict() for a in self.attributes],
            "class_names": list(self.class_names),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "StreamSchema":
        try:
            return cls(
                attributes=tuple(Attribute.from_dict(a) for a in data["attributes"]),
                class_names=tuple(str(c) for c in data["class_names"]),
                name=str(data.get("name", "stream")),
            )
        except KeyError as e:
            raise SchemaError(f"Schema descriptor is missing {e}") from e


@dataclass(frozen=True, eq=False)
class Instance:
    """One labeled record of a stream"""

    features: npt.NDArray[np.float64]
    label: int
    weight: float = 1.0
    # injected outlier, see the RBF generator's blip rate
    is_blip: bool = False

    def __post_init__(self) -> None:
        if self.weight < 0 or not math.isfinite(self.weight):
            raise SchemaError(f"Instance weight must be non-negative, got {self.weight}")


@dataclass(frozen=True, eq=False)
class Prediction:
    """An aggregated score vector and its argmax label"""

    scores: ScoreVector
    label: int


def uniform_scores(n_classes: int) -> ScoreVector:
    """The uniform vote (1/p, ..., 1/p)"""
    return np.full(n_classes, 1.0 / n_classes)


def normalize_scores(raw: npt.ArrayLike, n_classes: int) -> ScoreVector:
    """
    Rescale raw relevance scores so they sum to one

    Args:
        raw (ArrayLike): Non-negative raw scores, one per class
        n_classes (int): The class count p of the stream

    Returns:
        ScoreVector: raw / sum(raw), or the uniform vector when sum(raw) is 0

    Raises:
        SchemaError: If raw does not hold exactly p entries
        InvalidScoreError: If an entry is negative or not finite
    """
    scores = np.asarray(raw, dtype=np.float64)
    if scores.shape != (n_classes,):
        raise SchemaError(f"Expected {n_classes} scores, got shape {scores.shape}")
    if not np.all(np.isfinite(scores)) or np.any(scores < 0):
        raise InvalidScoreError(f"Scores must be finite and non-negative: {scores}")

    total = scores.sum()
    if total == 0:
        return uniform_scores(n_classes)
    return scores / total


def ideal_point(label: int, n_classes: int) -> ScoreVector:
    """
    One-hot vector of the true class in the p-dimensional score space

    Args:
        label (int): The class index
        n_classes (int): The class count p

    Returns:
        ScoreVector: Zeros everywhere except a 1 at position label
    """
    if not 0 <= label < n_classes:
        raise SchemaError(f"Label {label} outside [0, {n_classes})")
    point = np.zeros(n_classes)
    point[label] = 1.0
    return point


@runtime_checkable
class IncrementalClassifier(Protocol):
    """A learner that can be trained one instance at a time"""

    def train_on(self, instance: Instance) -> None: ...

    def score(self, features: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """Raw, non-negative per-class scores; never mutates the learner"""
        ...

    def memory_estimate(self) -> int: ...

    def prune(self, target_bytes: int) -> None: ...


@runtime_checkable
class StreamSource(Protocol):
    """A seeded, single-consumer source of instances"""

    def schema(self) -> StreamSchema: ...

    def next_instance(self) -> Instance | None:
        """The next instance, or None at end of stream"""
        ...

    def __iter__(self) -> Iterator[Instance]: ...


@runtime_checkable
class StreamClassifier(Protocol):
    """Anything the prequential harness can evaluate"""

    name: str

    def process_instance(self, instance: Instance) -> Prediction:
        """Predict on the instance first, then learn from its label"""
        ...

    def memory_estimate(self) -> int: ...
