from .data_classes import (
    ScoreVector,
    AttributeKind,
    LeafPrediction,
    Attribute,
    StreamSchema,
    Instance,
    Prediction,
    IncrementalClassifier,
    StreamSource,
    StreamClassifier,
    uniform_scores,
    normalize_scores,
    ideal_point,
)
from .buffers import WindowEntry, InstanceWindow, DataChunk
from .exceptions import (
    GooweError,
    SchemaError,
    InvalidScoreError,
    ConsistencyError,
    NoComponentsError,
    EmptyInputError,
    StreamParseError,
    DescriptorError,
    RaggedMatrixError,
)

__all__ = [
    "ScoreVector",
    "AttributeKind",
    "LeafPrediction",
    "Attribute",
    "StreamSchema",
    "Instance",
    "Prediction",
    "IncrementalClassifier",
    "StreamSource",
    "StreamClassifier",
    "uniform_scores",
    "normalize_scores",
    "ideal_point",
    "WindowEntry",
    "InstanceWindow",
    "DataChunk",
    "GooweError",
    "SchemaError",
    "InvalidScoreError",
    "ConsistencyError",
    "NoComponentsError",
    "EmptyInputError",
    "StreamParseError",
    "DescriptorError",
    "RaggedMatrixError",
]
