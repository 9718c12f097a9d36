import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

from .data_classes import Instance, ScoreVector
from .exceptions import ConsistencyError

logger = logging.getLogger(__name__)


@dataclass
class WindowEntry:
    """A windowed instance with the score vectors each component gave it"""

    instance: Instance
    scores: dict[int, ScoreVector] = field(default_factory=dict)


class InstanceWindow:
    """Sliding window over the latest labeled instances, FIFO eviction"""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError(f"Window capacity must be positive, got {capacity}")
        self.capacity = capacity
        self._entries: deque[WindowEntry] = deque()

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[WindowEntry]:
        return iter(self._entries)

    @property
    def is_full(self) -> bool:
        return len(self._entries) == self.capacity

    def push(
        self,
        instance: Instance,
        scores_by_component: dict[int, ScoreVector],
        live_components: Iterable[int] = (),
    ) -> WindowEntry | None:
        """
        Append the newest instance, evicting the oldest when full

        Args:
            instance (Instance): The labeled instance
            scores_by_component (dict): Normalized score vector per component id
            live_components (Iterable[int]): Ids that must all have a score

        Returns:
            WindowEntry | None: The evicted entry, if the window was full

        Raises:
            ConsistencyError: If a live component has no score for the instance
        """
        missing = [c for c in live_components if c not in scores_by_component]
        if missing:
            raise ConsistencyError(f"No cached scores for components {missing}")

        evicted = self._entries.popleft() if self.is_full else None
        self._entries.append(WindowEntry(instance, dict(scores_by_component)))
        return evicted

    def fill_missing(
        self, component_id: int, scorer: Callable[[Instance], ScoreVector]
    ) -> int:
        """
        Score windowed instances a component has no cached vector for

        Returns:
            int: How many entries were filled
        """
        filled = 0
        for entry in self._entries:
            if component_id not in entry.scores:
                entry.scores[component_id] = scorer(entry.instance)
                filled += 1
        if filled:
            logger.debug(f"Scored {filled} windowed instances for component {component_id}")
        return filled

    def forget(self, component_id: int) -> None:
        """Drop a removed component's cached scores"""
        for entry in self._entries:
            entry.scores.pop(component_id, None)

    def clear(self) -> None:
        self._entries.clear()


class DataChunk:
    """Tumbling buffer of h instances used to train new components"""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError(f"Chunk capacity must be positive, got {capacity}")
        self.capacity = capacity
        self._instances: list[Instance] = []

    def __len__(self) -> int:
        return len(self._instances)

    def __iter__(self) -> Iterator[Instance]:
        return iter(self._instances)

    def push(self, instance: Instance) -> list[Instance] | None:
        """
        Buffer an instance; emit and reset the chunk once it holds h instances

        Returns:
            list[Instance] | None: The full chunk, exactly when it fills up
        """
        self._instances.append(instance)
        if len(self._instances) < self.capacity:
            return None

        full, self._instances = self._instances, []
        return full
