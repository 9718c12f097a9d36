import dataclasses
import hashlib
from abc import ABC, abstractmethod
from typing import Iterator

import numpy as np

from data_classes import Instance, StreamSchema

SeedLike = int | np.random.SeedSequence


def seed_sequence(seed: SeedLike) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"Seed must fit in 64 unsigned bits, got {seed}")
    return np.random.SeedSequence(seed)


def spawn_generators(seed: SeedLike, n: int) -> list[np.random.Generator]:
    """n independent PCG64 generators derived from one seed"""
    return [np.random.Generator(np.random.PCG64(s)) for s in seed_sequence(seed).spawn(n)]


def spawn_seeds(seed: SeedLike, n: int) -> list[np.random.SeedSequence]:
    return seed_sequence(seed).spawn(n)


class BaseStream(ABC):
    """A single-consumer instance source, optionally capped at `length` instances"""

    _schema: StreamSchema

    def __init__(self, length: int | None = None):
        if length is not None and length < 0:
            raise ValueError(f"Stream length must be non-negative, got {length}")
        self.length = length
        self.position = 0

    def schema(self) -> StreamSchema:
        return self._schema

    def named(self, name: str) -> "BaseStream":
        """Rename the stream's schema (presets name their streams)"""
        self._schema = dataclasses.replace(self._schema, name=name)
        return self

    @abstractmethod
    def _next(self) -> Instance | None: ...

    def next_instance(self) -> Instance | None:
        if self.length is not None and self.position >= self.length:
            return None
        instance = self._next()
        if instance is None:
            return None
        self.position += 1
        return instance

    def __iter__(self) -> Iterator[Instance]:
        while (instance := self.next_instance()) is not None:
            yield instance


def sequence_digest(stream: BaseStream, n: int) -> str:
    """SHA-256 over the next n instances (features and labels)"""
    digest = hashlib.sha256()
    for _ in range(n):
        instance = stream.next_instance()
        if instance is None:
            break
        digest.update(np.ascontiguousarray(instance.features, dtype=np.float64).tobytes())
        digest.update(int(instance.label).to_bytes(4, "little"))
    return digest.hexdigest()
