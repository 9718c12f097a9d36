from .streams import BaseStream, sequence_digest, spawn_generators, spawn_seeds
from .generators import (
    LED_SEGMENTS,
    SEA_THRESHOLDS,
    HyperplaneGenerator,
    LedGenerator,
    RandomRbfGenerator,
    RandomTreeGenerator,
    SeaGenerator,
)
from .sigmoid_join import SigmoidJoin, chain, join_probability
from .readers import FileStream, load_sidecar, read_arff, read_csv, sidecar_path, write_sidecar
from .registry import PRESETS, available_streams, build_stream, open_stream_file

__all__ = [
    "BaseStream",
    "sequence_digest",
    "spawn_generators",
    "spawn_seeds",
    "LED_SEGMENTS",
    "SEA_THRESHOLDS",
    "HyperplaneGenerator",
    "LedGenerator",
    "RandomRbfGenerator",
    "RandomTreeGenerator",
    "SeaGenerator",
    "SigmoidJoin",
    "chain",
    "join_probability",
    "FileStream",
    "load_sidecar",
    "read_arff",
    "read_csv",
    "sidecar_path",
    "write_sidecar",
    "PRESETS",
    "available_streams",
    "build_stream",
    "open_stream_file",
]
