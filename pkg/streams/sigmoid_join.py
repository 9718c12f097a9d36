from scipy.special import expit

from data_classes import Instance, SchemaError

from .streams import BaseStream, SeedLike, spawn_generators


def join_probability(t: int, position: int, width: int) -> float:
    """P(instance t comes from the joined stream); a hard switch when width is 0"""
    if width <= 0:
        return 1.0 if t >= position else 0.0
    return float(expit(4.0 * (t - position) / width))


class SigmoidJoin(BaseStream):
    """
    Concept change from stream `a` to stream `b` centered at `position`.

    Instance t is drawn from b with probability 1 / (1 + e^(-4(t - position)/width)).
    Only the chosen stream advances.
    """

    def __init__(
        self,
        a: BaseStream,
        b: BaseStream,
        position: int,
        width: int,
        seed: SeedLike = 1,
        length: int | None = None,
    ):
        super().__init__(length)
        if width < 0:
            raise ValueError(f"Join width must be non-negative, got {width}")
        if not a.schema().is_compatible(b.schema()):
            raise SchemaError(
                f"Cannot join {a.schema().name} and {b.schema().name}: schemas differ"
            )
        self.a = a
        self.b = b
        self.join_position = position
        self.width = width
        (self._rng,) = spawn_generators(seed, 1)
        self._schema = a.schema()
        self.from_b = 0

    def _next(self) -> Instance | None:
        p = join_probability(self.position, self.join_position, self.width)
        if self._rng.random() < p:
            self.from_b += 1
            return self.b.next_instance()
        return self.a.next_instance()


def chain(
    streams: list[BaseStream],
    positions: list[int],
    width: int,
    seeds: list[SeedLike],
    length: int | None = None,
) -> BaseStream:
    """
    Join streams left to right: ((s0 ⊕ s1) ⊕ s2) ⊕ ...

    Args:
        streams (list[BaseStream]): The concepts in order
        positions (list[int]): Change centers, one per join
        width (int): Change width of every join
        seeds (list[SeedLike]): Seeds of the joins
        length (int | None): Cap of the outermost stream

    Returns:
        BaseStream: The joined stream
    """
    if len(positions) != len(streams) - 1 or len(seeds) < len(positions):
        raise ValueError(
            f"{len(streams)} streams need {len(streams) - 1} positions and seeds"
        )
    joined = streams[0]
    for stream, position, seed in zip(streams[1:], positions, seeds):
        joined = SigmoidJoin(joined, stream, position, width, seed)
    joined.length = length
    return joined
