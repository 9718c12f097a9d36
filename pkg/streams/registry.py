import logging
import math
from pathlib import Path
from typing import Any, Callable

from data_classes import DescriptorError

from .generators import (
    HyperplaneGenerator,
    LedGenerator,
    RandomRbfGenerator,
    RandomTreeGenerator,
    SeaGenerator,
)
from .readers import read_arff, read_csv
from .sigmoid_join import SigmoidJoin, chain
from .streams import BaseStream, spawn_seeds

logger = logging.getLogger(__name__)

RBF_FEATURES = 20
RBF_BLIP_RATE = 0.001
RBF_SLOW = 0.0001
RBF_FAST = 0.01
ABRUPT_WIDTH = 50

GENERATORS: dict[str, Callable[..., BaseStream]] = {
    "rbf": RandomRbfGenerator,
    "sea": SeaGenerator,
    "hyperplane": HyperplaneGenerator,
    "random_tree": RandomTreeGenerator,
    "led": LedGenerator,
}


def drift_positions(length: int, n_drifts: int) -> list[int]:
    """n_drifts change points spread evenly over the stream"""
    return [(i + 1) * length // (n_drifts + 1) for i in range(n_drifts)]


def concept_length(length: int, n_drifts: int) -> int:
    return max(1, math.ceil(length / (n_drifts + 1)))


def rbf_gradual(n_classes: int, drift_speed: float, seed: int, length: int, **params: Any) -> BaseStream:
    options = {"n_features": RBF_FEATURES, "blip_rate": RBF_BLIP_RATE, **params}
    return RandomRbfGenerator(
        n_classes=n_classes, drift_speed=drift_speed, seed=seed, length=length, **options
    )


def rbf_abrupt(
    n_classes: int,
    n_drifts: int,
    seed: int,
    length: int,
    width: int = ABRUPT_WIDTH,
    **params: Any,
) -> BaseStream:
    """A new drift-free RBF concept at each of n_drifts sigmoid joins"""
    seeds = spawn_seeds(seed, 2 * n_drifts + 1)
    options = {"n_features": RBF_FEATURES, **params}
    concepts: list[BaseStream] = [
        RandomRbfGenerator(n_classes=n_classes, seed=s, **options) for s in seeds[: n_drifts + 1]
    ]
    return chain(concepts, drift_positions(length, n_drifts), width, seeds[n_drifts + 1 :], length)


def sea(n_drifts: int, seed: int, length: int, noise_percentage: float = 0.1) -> BaseStream:
    return SeaGenerator(
        classification_functions=(0, 1, 2, 3),
        concept_length=concept_length(length, n_drifts),
        noise_percentage=noise_percentage,
        seed=seed,
        length=length,
    )


def hyperplane(mag_change: float, seed: int, length: int, noise_percentage: float = 0.05) -> BaseStream:
    return HyperplaneGenerator(
        n_features=10,
        mag_change=mag_change,
        noise_percentage=noise_percentage,
        seed=seed,
        length=length,
    )


def random_tree(n_classes: int, n_drifts: int, seed: int, length: int, **params: Any) -> BaseStream:
    """Two trees taking turns, so every other concept reoccurs"""
    return RandomTreeGenerator(
        n_classes=n_classes,
        n_concepts=2,
        reswap_every=concept_length(length, n_drifts),
        seed=seed,
        length=length,
        **params,
    )


def led_mixed(seed: int, length: int, noise_percentage: float = 0.1) -> BaseStream:
    """Two gradually drifting LED concepts switching abruptly at the midpoint"""
    s = spawn_seeds(seed, 7)
    gradual = max(1, length // 10)

    def concept(first: int, second: int, k: int, center: int) -> BaseStream:
        return SigmoidJoin(
            LedGenerator(noise_percentage, n_drift_features=first, seed=s[k]),
            LedGenerator(noise_percentage, n_drift_features=second, seed=s[k + 1]),
            center,
            gradual,
            seed=s[k + 2],
        )

    return SigmoidJoin(
        concept(0, 1, 0, length // 4),
        concept(3, 5, 3, length // 4),
        length // 2,
        ABRUPT_WIDTH,
        seed=s[6],
        length=length,
    )


def led_stationary(seed: int, length: int, noise_percentage: float = 0.2) -> BaseStream:
    return LedGenerator(noise_percentage, seed=seed, length=length)


def rbf_stationary(seed: int, length: int, n_classes: int = 10, **params: Any) -> BaseStream:
    options = {"n_features": RBF_FEATURES, **params}
    return RandomRbfGenerator(n_classes=n_classes, seed=seed, length=length, **options)


Preset = Callable[..., BaseStream]

PRESETS: dict[str, tuple[Preset, int]] = {
    "rbf-g-4-s": (lambda seed, length, **kw: rbf_gradual(4, RBF_SLOW, seed, length, **kw), 1_000_000),
    "rbf-g-4-f": (lambda seed, length, **kw: rbf_gradual(4, RBF_FAST, seed, length, **kw), 1_000_000),
    "rbf-g-10-s": (lambda seed, length, **kw: rbf_gradual(10, RBF_SLOW, seed, length, **kw), 1_000_000),
    "rbf-g-10-f": (lambda seed, length, **kw: rbf_gradual(10, RBF_FAST, seed, length, **kw), 1_000_000),
    "rbf-a-4-s": (lambda seed, length, n_drifts=10, **kw: rbf_abrupt(4, n_drifts, seed, length, **kw), 1_000_000),
    "rbf-a-4-f": (lambda seed, length, n_drifts=100, **kw: rbf_abrupt(4, n_drifts, seed, length, **kw), 1_000_000),
    "rbf-a-10-s": (lambda seed, length, n_drifts=10, **kw: rbf_abrupt(10, n_drifts, seed, length, **kw), 1_000_000),
    "rbf-a-10-f": (lambda seed, length, n_drifts=100, **kw: rbf_abrupt(10, n_drifts, seed, length, **kw), 1_000_000),
    "sea-s": (lambda seed, length, n_drifts=3, **kw: sea(n_drifts, seed, length, **kw), 1_000_000),
    "sea-f": (lambda seed, length, n_drifts=9, **kw: sea(n_drifts, seed, length, **kw), 2_000_000),
    "hyp-s": (lambda seed, length, **kw: hyperplane(0.001, seed, length, **kw), 1_000_000),
    "hyp-f": (lambda seed, length, **kw: hyperplane(0.1, seed, length, **kw), 1_000_000),
    "tree-s": (lambda seed, length, n_drifts=4, **kw: random_tree(4, n_drifts, seed, length, **kw), 1_000_000),
    "tree-f": (lambda seed, length, n_drifts=15, **kw: random_tree(6, n_drifts, seed, length, **kw), 100_000),
    "led-m": (led_mixed, 1_000_000),
    "led-nd": (led_stationary, 10_000_000),
    "rbf-stationary": (rbf_stationary, 1_000_000),
}


def available_streams() -> list[str]:
    return sorted(PRESETS) + sorted(GENERATORS)


def build_stream(
    name: str, seed: int, length: int | None = None, params: dict[str, Any] | None = None
) -> BaseStream:
    """
    Build a preset or a raw generator

    Presets place their drifts relative to `length` and default to their
    full-size length; raw generators are unbounded unless `length` is given.

    Args:
        name (str): Preset or generator name
        seed (int): 64-bit seed
        length (int | None): Instance count
        params (dict | None): Keyword overrides for the preset or generator

    Returns:
        BaseStream: The seeded stream

    Raises:
        DescriptorError: On an unknown name or invalid parameters
    """
    params = dict(params or {})
    key = name.lower()
    try:
        if key in PRESETS:
            factory, default_length = PRESETS[key]
            stream = factory(seed=seed, length=length or default_length, **params)
        elif key in GENERATORS:
            stream = GENERATORS[key](seed=seed, length=length, **params)
        else:
            raise DescriptorError(
                f"Unknown stream: {name} (expected one of {', '.join(available_streams())})"
            )
    except (TypeError, ValueError) as e:
        if isinstance(e, DescriptorError):
            raise
        raise DescriptorError(f"Invalid parameters for stream {name}: {e}") from e

    logger.debug(f"Built stream {key} (seed {seed}, length {stream.length})")
    return stream.named(key)


def open_stream_file(
    path: str | Path, class_attribute: str | None = None, length: int | None = None
) -> BaseStream:
    """Open an ARFF or headerless CSV stream by file suffix"""
    path = Path(path)
    if path.suffix.lower() == ".arff":
        return read_arff(path, class_attribute=class_attribute, length=length)
    return read_csv(path, length=length)
