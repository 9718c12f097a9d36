from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from data_classes import Attribute, Instance, StreamSchema

from .streams import BaseStream, SeedLike, spawn_generators

BINARY = ("0", "1")


class RandomRbfGenerator(BaseStream):
    """
    Gaussian clusters around random centroids, each centroid carrying a class.

    Every `drift_interval` instances each centroid moves `drift_speed` along
    its own direction, bouncing off the unit hypercube. With `blip_rate` > 0
    a fraction of instances get a random label and are marked as blips.
    """

    def __init__(
        self,
        n_features: int = 10,
        n_classes: int = 2,
        n_centroids: int = 50,
        drift_speed: float = 0.0,
        drift_interval: int = 500,
        blip_rate: float = 0.0,
        std: float | None = None,
        seed: SeedLike = 1,
        length: int | None = None,
    ):
        """
        Place the centroids

        Args:
            n_features (int): Numeric attribute count
            n_classes (int): Class count p
            n_centroids (int): Number of clusters
            drift_speed (float): Distance each centroid moves per drift step
            drift_interval (int): Instances between drift steps
            blip_rate (float): Probability of a random-label outlier
            std (float | None): Fixed cluster spread; random per centroid when None
            seed (SeedLike): 64-bit seed
            length (int | None): Stop after this many instances
        """
        super().__init__(length)
        if n_centroids < 1 or drift_interval < 1:
            raise ValueError("n_centroids and drift_interval must be positive")
        if not 0 <= blip_rate <= 1:
            raise ValueError(f"Blip rate must be in [0, 1], got {blip_rate}")

        self.n_features = n_features
        self.n_classes = n_classes
        self.drift_speed = drift_speed
        self.drift_interval = drift_interval
        self.blip_rate = blip_rate

        model_rng, self._rng = spawn_generators(seed, 2)
        self.centers = model_rng.random((n_centroids, n_features))
        self.stds = np.full(n_centroids, std) if std is not None else model_rng.random(n_centroids)
        self.labels = model_rng.integers(n_classes, size=n_centroids)
        # 1 - U(0, 1] keeps every weight positive
        weights = 1.0 - model_rng.random(n_centroids)
        self.probabilities = weights / weights.sum()
        directions = model_rng.standard_normal((n_centroids, n_features))
        self.directions = directions / np.linalg.norm(directions, axis=1, keepdims=True)

        self._schema = StreamSchema(
            attributes=tuple(Attribute.numeric(f"att{i + 1}") for i in range(n_features)),
            class_names=tuple(f"class{c + 1}" for c in range(n_classes)),
            name="rbf",
        )

    def _move_centroids(self) -> None:
        self.centers += self.directions * self.drift_speed
        low = self.centers < 0
        high = self.centers > 1
        self.centers[low] = -self.centers[low]
        self.centers[high] = 2.0 - self.centers[high]
        self.directions[low | high] *= -1

    def _next(self) -> Instance:
        if self.drift_speed and self.position and self.position % self.drift_interval == 0:
            self._move_centroids()

        rng = self._rng
        centroid = int(rng.choice(len(self.probabilities), p=self.probabilities))
        direction = rng.standard_normal(self.n_features)
        norm = np.linalg.norm(direction)
        direction = direction / norm if norm > 0 else direction
        magnitude = rng.normal(0.0, self.stds[centroid])

        blip_draw = rng.random()
        blip_label = int(rng.integers(self.n_classes))
        features = self.centers[centroid] + direction * magnitude
        if blip_draw < self.blip_rate:
            return Instance(features, blip_label, is_blip=True)
        return Instance(features, int(self.labels[centroid]))


SEA_THRESHOLDS = (8.0, 9.0, 7.0, 9.5)


class SeaGenerator(BaseStream):
    """
    Three uniform attributes on [0, 10]; class 1 when att1 + att2 ≤ threshold.

    The threshold cycles through `classification_functions` (indices into
    SEA_THRESHOLDS) every `concept_length` instances.
    """

    def __init__(
        self,
        classification_functions: tuple[int, ...] = (0,),
        concept_length: int | None = None,
        noise_percentage: float = 0.0,
        seed: SeedLike = 1,
        length: int | None = None,
    ):
        super().__init__(length)
        if not classification_functions or any(
            not 0 <= f < len(SEA_THRESHOLDS) for f in classification_functions
        ):
            raise ValueError(
                f"SEA classification functions must be in [0, {len(SEA_THRESHOLDS)})"
            )
        if not 0 <= noise_percentage <= 1:
            raise ValueError(f"Noise must be in [0, 1], got {noise_percentage}")
        self.classification_functions = tuple(classification_functions)
        self.concept_length = concept_length
        self.noise_percentage = noise_percentage
        (self._rng,) = spawn_generators(seed, 1)
        self._schema = StreamSchema(
            attributes=tuple(Attribute.numeric(f"att{i + 1}") for i in range(3)),
            class_names=BINARY,
            name="sea",
        )

    @property
    def threshold(self) -> float:
        concept = 0
        if self.concept_length:
            concept = (self.position // self.concept_length) % len(self.classification_functions)
        return SEA_THRESHOLDS[self.classification_functions[concept]]

    def _next(self) -> Instance:
        features = self._rng.random(3) * 10.0
        label = int(features[0] + features[1] <= self.threshold)
        if self._rng.random() < self.noise_percentage:
            label = 1 - label
        return Instance(features, label)


class HyperplaneGenerator(BaseStream):
    """Rotating hyperplane Σ w_i·x_i ≥ ½·Σ w_i on [0, 1]^d with drifting weights"""

    def __init__(
        self,
        n_features: int = 10,
        mag_change: float = 0.0,
        sigma_percentage: float = 0.1,
        noise_percentage: float = 0.05,
        seed: SeedLike = 1,
        length: int | None = None,
    ):
        super().__init__(length)
        if not 0 <= noise_percentage <= 1:
            raise ValueError(f"Noise must be in [0, 1], got {noise_percentage}")
        self.n_features = n_features
        self.mag_change = mag_change
        self.sigma_percentage = sigma_percentage
        self.noise_percentage = noise_percentage
        model_rng, self._rng = spawn_generators(seed, 2)
        self.weights = model_rng.random(n_features)
        self.sigma = np.ones(n_features)
        self._schema = StreamSchema(
            attributes=tuple(Attribute.numeric(f"att{i + 1}") for i in range(n_features)),
            class_names=BINARY,
            name="hyperplane",
        )

    def _next(self) -> Instance:
        rng = self._rng
        features = rng.random(self.n_features)
        label = int(features @ self.weights >= 0.5 * self.weights.sum())
        if rng.random() < self.noise_percentage:
            label = 1 - label

        reverse = rng.random(self.n_features) < self.sigma_percentage
        if self.mag_change:
            self.weights += self.sigma * (self.mag_change / self.n_features)
            self.sigma[reverse] *= -1
        return Instance(features, label)


@dataclass
class TreeNode:
    attribute: int = -1
    threshold: float = 0.0
    label: int = -1
    children: list["TreeNode"] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children


class RandomTreeGenerator(BaseStream):
    """
    Labels uniform instances with a randomly built decision tree.

    `n_concepts` independent trees are built up front; every `reswap_every`
    instances the stream switches to the next one, cycling back to the first
    so concepts reoccur.
    """

    def __init__(
        self,
        n_classes: int = 2,
        n_nominal: int = 5,
        n_numeric: int = 5,
        n_values_per_nominal: int = 5,
        max_depth: int = 5,
        min_leaf_depth: int = 3,
        leaf_fraction: float = 0.15,
        n_concepts: int = 1,
        reswap_every: int | None = None,
        seed: SeedLike = 1,
        length: int | None = None,
    ):
        super().__init__(length)
        if n_concepts < 1:
            raise ValueError(f"n_concepts must be positive, got {n_concepts}")
        self.n_classes = n_classes
        self.n_nominal = n_nominal
        self.n_numeric = n_numeric
        self.n_values_per_nominal = n_values_per_nominal
        self.max_depth = max_depth
        self.min_leaf_depth = min_leaf_depth
        self.leaf_fraction = leaf_fraction
        self.reswap_every = reswap_every

        *tree_rngs, self._rng = spawn_generators(seed, n_concepts + 1)
        self.trees = [self._build(rng, 0, set(), [(0.0, 1.0)] * n_numeric) for rng in tree_rngs]

        values = tuple(str(v) for v in range(n_values_per_nominal))
        self._schema = StreamSchema(
            attributes=tuple(Attribute.nominal(f"nom{i + 1}", values) for i in range(n_nominal))
            + tuple(Attribute.numeric(f"num{i + 1}") for i in range(n_numeric)),
            class_names=tuple(f"class{c + 1}" for c in range(n_classes)),
            name="random_tree",
        )

    def _build(
        self,
        rng: np.random.Generator,
        depth: int,
        used_nominal: set[int],
        ranges: list[tuple[float, float]],
    ) -> TreeNode:
        candidates = [a for a in range(self.n_nominal) if a not in used_nominal] + list(
            range(self.n_nominal, self.n_nominal + self.n_numeric)
        )
        stop = depth >= self.max_depth or not candidates or (
            depth >= self.min_leaf_depth and rng.random() < self.leaf_fraction
        )
        if stop:
            return TreeNode(label=int(rng.integers(self.n_classes)))

        attribute = int(candidates[rng.integers(len(candidates))])
        if attribute < self.n_nominal:
            return TreeNode(
                attribute=attribute,
                children=[
                    self._build(rng, depth + 1, used_nominal | {attribute}, ranges)
                    for _ in range(self.n_values_per_nominal)
                ],
            )

        k = attribute - self.n_nominal
        low, high = ranges[k]
        threshold = low + rng.random() * (high - low)
        left = list(ranges)
        right = list(ranges)
        left[k] = (low, threshold)
        right[k] = (threshold, high)
        return TreeNode(
            attribute=attribute,
            threshold=threshold,
            children=[
                self._build(rng, depth + 1, used_nominal, left),
                self._build(rng, depth + 1, used_nominal, right),
            ],
        )

    @property
    def concept(self) -> int:
        if not self.reswap_every:
            return 0
        return (self.position // self.reswap_every) % len(self.trees)

    def classify(self, features: npt.NDArray[np.float64], concept: int = 0) -> int:
        node = self.trees[concept]
        while not node.is_leaf:
            value = features[node.attribute]
            if node.attribute < self.n_nominal:
                node = node.children[int(value)]
            else:
                node = node.children[0 if value <= node.threshold else 1]
        return node.label

    def _next(self) -> Instance:
        nominal = self._rng.integers(self.n_values_per_nominal, size=self.n_nominal)
        numeric = self._rng.random(self.n_numeric)
        features = np.concatenate([nominal.astype(np.float64), numeric])
        return Instance(features, self.classify(features, self.concept))


# Segments in order: top, top-left, top-right, middle, bottom-left, bottom-right, bottom
LED_SEGMENTS = np.array(
    [
        [1, 1, 1, 0, 1, 1, 1],
        [0, 0, 1, 0, 0, 1, 0],
        [1, 0, 1, 1, 1, 0, 1],
        [1, 0, 1, 1, 0, 1, 1],
        [0, 1, 1, 1, 0, 1, 0],
        [1, 1, 0, 1, 0, 1, 1],
        [1, 1, 0, 1, 1, 1, 1],
        [1, 0, 1, 0, 0, 1, 0],
        [1, 1, 1, 1, 1, 1, 1],
        [1, 1, 1, 1, 0, 1, 1],
    ],
    dtype=np.float64,
)
LED_IRRELEVANT = 17


class LedGenerator(BaseStream):
    """
    Seven-segment digit display plus 17 irrelevant random bits.

    Each of the 24 attributes is inverted with probability `noise_percentage`.
    `n_drift_features` swaps that many segment attributes with irrelevant ones.
    """

    def __init__(
        self,
        noise_percentage: float = 0.1,
        n_drift_features: int = 0,
        seed: SeedLike = 1,
        length: int | None = None,
    ):
        super().__init__(length)
        if not 0 <= noise_percentage <= 1:
            raise ValueError(f"Noise must be in [0, 1], got {noise_percentage}")
        if not 0 <= n_drift_features <= 7:
            raise ValueError(f"n_drift_features must be in [0, 7], got {n_drift_features}")
        self.noise_percentage = noise_percentage
        self.n_drift_features = n_drift_features
        (self._rng,) = spawn_generators(seed, 1)

        n_attributes = 7 + LED_IRRELEVANT
        self.order = np.arange(n_attributes)
        for i in range(n_drift_features):
            self.order[[i, 7 + i]] = self.order[[7 + i, i]]

        self._schema = StreamSchema(
            attributes=tuple(Attribute.nominal(f"att{i + 1}", BINARY) for i in range(n_attributes)),
            class_names=tuple(str(d) for d in range(10)),
            name="led",
        )

    def _next(self) -> Instance:
        rng = self._rng
        digit = int(rng.integers(10))
        raw = np.concatenate(
            [LED_SEGMENTS[digit], rng.integers(2, size=LED_IRRELEVANT).astype(np.float64)]
        )
        flips = rng.random(raw.size) < self.noise_percentage
        raw[flips] = 1.0 - raw[flips]
        return Instance(raw[self.order], digit)

