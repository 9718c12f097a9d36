import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt
from scipy.special import ndtr

from data_classes import Instance, LeafPrediction, StreamSchema

from .naive_bayes import (
    VALUE_BYTES,
    NaiveBayesModel,
    attribute_statistics_bytes,
)

logger = logging.getLogger(__name__)

# Memory formula constants (bytes):
#   TREE_BYTES
#   + SPLIT_NODE_BYTES per split node
#   + LEAF_NODE_BYTES + 2·p·VALUE_BYTES per leaf (class counts, split-time prior)
#   + attribute statistics of every active leaf (see naive_bayes)
# An untrained tree is TREE_BYTES + one active leaf.
TREE_BYTES = 128
SPLIT_NODE_BYTES = 96
LEAF_NODE_BYTES = 96

# Candidate thresholds per numeric attribute, evenly spaced inside the observed range
NUMERIC_SPLIT_POINTS = 10
# How often a numeric attribute may be tested on one root-to-leaf path
NUMERIC_SPLIT_LIMIT = 8


def hoeffding_bound(value_range: float, confidence: float, n: float) -> float:
    """
    Confidence radius of a mean over n observations

    Args:
        value_range (float): Range R of the observed quantity
        confidence (float): Split confidence δ
        n (float): Number of observations

    Returns:
        float: sqrt(R² · ln(1/δ) / (2n))
    """
    return math.sqrt(value_range * value_range * math.log(1.0 / confidence) / (2.0 * n))


def entropy(counts: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """Base-2 entropy of class-count vectors along the last axis"""
    counts = np.asarray(counts, dtype=np.float64)
    totals = counts.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        probs = np.where(totals > 0, counts / totals, 0.0)
        terms = np.where(probs > 0, probs * np.log2(probs), 0.0)
    return -terms.sum(axis=-1)


def information_gain(
    parent: npt.NDArray[np.float64], children: npt.NDArray[np.float64]
) -> float:
    """Entropy reduction of splitting parent counts into children (rows of class counts)"""
    total = parent.sum()
    if total <= 0:
        return 0.0
    weights = children.sum(axis=1) / total
    return float(entropy(parent) - (weights * entropy(children)).sum())


@dataclass
class LeafNode:
    """A leaf with its Naive Bayes model; a deactivated leaf keeps its frozen class counts"""

    model: NaiveBayesModel | None
    class_counts: npt.NDArray[np.float64]
    prior: npt.NDArray[np.float64]
    created: int
    numeric_uses: dict[int, int] = field(default_factory=dict)
    nominal_used: frozenset[int] = frozenset()
    seen: float = 0.0
    seen_at_last_attempt: float = 0.0
    nb_correct: float = 0.0
    mc_correct: float = 0.0

    @property
    def active(self) -> bool:
        return self.model is not None


@dataclass
class SplitNode:
    """Tests one attribute: binary threshold for numeric, one branch per value for nominal"""

    attribute: int
    threshold: float | None
    children: list["LeafNode | SplitNode"]

    def branch(self, features: npt.NDArray[np.float64]) -> int:
        value = features[self.attribute]
        if self.threshold is None:
            return int(value)
        return 0 if value <= self.threshold else 1


@dataclass
class SplitCandidate:
    gain: float
    attribute: int
    threshold: float | None
    children: npt.NDArray[np.float64]


class HoeffdingTree:
    """Incremental decision tree splitting on the Hoeffding bound, with Naive Bayes leaves"""

    def __init__(
        self,
        schema: StreamSchema,
        grace_period: int = 100,
        split_confidence: float = 0.01,
        tie_threshold: float = 0.05,
        leaf_prediction: LeafPrediction = LeafPrediction.NAIVE_BAYES_ADAPTIVE,
    ):
        """
        Initialize an empty tree (a single active leaf)

        Args:
            schema (StreamSchema): The stream schema
            grace_period (int): Instances a leaf sees between split attempts (n_min)
            split_confidence (float): δ of the Hoeffding bound
            tie_threshold (float): τ, bound below which the best split is taken as a tie
            leaf_prediction (LeafPrediction): How leaves produce scores
        """
        if not 0 < split_confidence < 1:
            raise ValueError(f"Split confidence must be in (0, 1), got {split_confidence}")
        if grace_period < 1:
            raise ValueError(f"Grace period must be positive, got {grace_period}")

        self.schema = schema
        self.grace_period = grace_period
        self.split_confidence = split_confidence
        self.tie_threshold = tie_threshold
        self.leaf_prediction = leaf_prediction
        # information gain ranges over [0, log2 p]
        self.gain_range = math.log2(schema.n_classes)

        self._creation = itertools.count()
        self._leaf_bytes = LEAF_NODE_BYTES + 2 * VALUE_BYTES * schema.n_classes
        self._statistics_bytes = attribute_statistics_bytes(schema)

        self.instances_seen = 0.0
        self.split_attempts = 0
        self.n_split_nodes = 0
        self.n_leaves = 0
        self.n_active_leaves = 0
        self.root: LeafNode | SplitNode = self._new_leaf(np.zeros(schema.n_classes))

    @property
    def n_nodes(self) -> int:
        return self.n_split_nodes + self.n_leaves

    def _new_leaf(
        self,
        prior: npt.NDArray[np.float64],
        numeric_uses: dict[int, int] | None = None,
        nominal_used: frozenset[int] = frozenset(),
    ) -> LeafNode:
        model = NaiveBayesModel(self.schema)
        self.n_leaves += 1
        self.n_active_leaves += 1
        return LeafNode(
            model=model,
            class_counts=model.class_counts,
            prior=prior,
            created=next(self._creation),
            numeric_uses=numeric_uses or {},
            nominal_used=nominal_used,
        )

    def _sort(
        self, features: npt.NDArray[np.float64]
    ) -> tuple[LeafNode, SplitNode | None, int]:
        """Route features to their leaf, returning the leaf, its parent and branch index"""
        node, parent, branch = self.root, None, 0
        while isinstance(node, SplitNode):
            parent, branch = node, node.branch(features)
            node = node.children[branch]
        return node, parent, branch

    def leaves(self) -> list[LeafNode]:
        out: list[LeafNode] = []
        stack: list[LeafNode | SplitNode] = [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, SplitNode):
                stack.extend(reversed(node.children))
            else:
                out.append(node)
        return out

    def _majority_scores(self, leaf: LeafNode) -> npt.NDArray[np.float64]:
        if leaf.class_counts.sum() > 0:
            return leaf.class_counts.copy()
        return leaf.prior.copy()

    def _naive_bayes_scores(
        self, leaf: LeafNode, features: npt.NDArray[np.float64]
    ) -> npt.NDArray[np.float64]:
        assert leaf.model is not None
        if leaf.model.total_count == 0:
            return leaf.prior.copy()
        return leaf.model.score(features)

    def _leaf_scores(
        self, leaf: LeafNode, features: npt.NDArray[np.float64]
    ) -> npt.NDArray[np.float64]:
        if not leaf.active or self.leaf_prediction is LeafPrediction.MAJORITY_CLASS:
            return self._majority_scores(leaf)
        if self.leaf_prediction is LeafPrediction.NAIVE_BAYES:
            return self._naive_bayes_scores(leaf, features)
        # adaptive: Naive Bayes only once it has beaten the majority class at this leaf
        if leaf.nb_correct > leaf.mc_correct:
            return self._naive_bayes_scores(leaf, features)
        return self._majority_scores(leaf)

    def score(self, features: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """
        Raw class scores of the leaf the features fall into

        Args:
            features (ndarray): A schema-conforming feature vector

        Returns:
            ndarray: Non-negative per-class scores (all zeros when nothing is known)
        """
        leaf, _, _ = self._sort(features)
        return self._leaf_scores(leaf, features)

    def train_on(self, instance: Instance) -> None:
        """
        Route the instance to its leaf, update the leaf and try to split it

        Args:
            instance (Instance): A schema-conforming labeled instance
        """
        leaf, parent, branch = self._sort(instance.features)
        w = instance.weight
        self.instances_seen += w
        leaf.seen += w

        if not leaf.active:
            return

        if self.leaf_prediction is LeafPrediction.NAIVE_BAYES_ADAPTIVE:
            self._track_leaf_accuracy(leaf, instance)

        assert leaf.model is not None
        leaf.model.train_on(instance)

        if leaf.seen - leaf.seen_at_last_attempt >= self.grace_period:
            self._attempt_split(leaf, parent, branch)

    def _track_leaf_accuracy(self, leaf: LeafNode, instance: Instance) -> None:
        """Evaluate-then-train bookkeeping for the adaptive leaf rule"""
        majority = self._majority_scores(leaf)
        if majority.sum() > 0 and int(np.argmax(majority)) == instance.label:
            leaf.mc_correct += instance.weight
        naive_bayes = self._naive_bayes_scores(leaf, instance.features)
        if naive_bayes.sum() > 0 and int(np.argmax(naive_bayes)) == instance.label:
            leaf.nb_correct += instance.weight

    def _numeric_candidates(self, leaf: LeafNode) -> list[SplitCandidate]:
        model = leaf.model
        assert model is not None
        candidates: list[SplitCandidate] = []
        present = model.class_counts > 0
        std = np.sqrt(model.variance())

        for k, attribute in enumerate(self.schema.numeric_index):
            attribute = int(attribute)
            if leaf.numeric_uses.get(attribute, 0) >= NUMERIC_SPLIT_LIMIT:
                continue
            low = model.numeric_min[present, k].min()
            high = model.numeric_max[present, k].max()
            if not high > low:
                continue

            thresholds = low + (high - low) * np.arange(1, NUMERIC_SPLIT_POINTS + 1) / (
                NUMERIC_SPLIT_POINTS + 1
            )
            counts = model.numeric_count[:, k]
            # Gaussian estimate of each class's weight below every threshold
            z = (thresholds[:, None] - model.numeric_mean[:, k]) / std[:, k]
            left = counts * ndtr(z)
            right = counts - left

            for t, threshold in enumerate(thresholds):
                children = np.vstack([left[t], right[t]])
                gain = information_gain(model.class_counts, children)
                candidates.append(
                    SplitCandidate(gain, attribute, float(threshold), children)
                )
        return candidates

    def _nominal_candidates(self, leaf: LeafNode) -> list[SplitCandidate]:
        model = leaf.model
        assert model is not None
        candidates: list[SplitCandidate] = []
        for counts, attribute in zip(model.nominal_counts, self.schema.nominal_index):
            attribute = int(attribute)
            if attribute in leaf.nominal_used:
                continue
            children = counts.T.copy()
            if np.count_nonzero(children.sum(axis=1)) < 2:
                continue
            gain = information_gain(model.class_counts, children)
            candidates.append(SplitCandidate(gain, attribute, None, children))
        return candidates

    def _attempt_split(
        self, leaf: LeafNode, parent: SplitNode | None, branch: int
    ) -> None:
        assert leaf.model is not None
        self.split_attempts += 1
        leaf.seen_at_last_attempt = leaf.seen

        if np.count_nonzero(leaf.class_counts) < 2:
            return

        candidates = self._numeric_candidates(leaf) + self._nominal_candidates(leaf)
        if not candidates:
            return
        # stable sort: equal gains keep attribute order
        candidates.sort(key=lambda c: c.gain, reverse=True)
        best = candidates[0]
        # the best split of a different attribute, or not splitting at all
        second_gain = max(
            (c.gain for c in candidates[1:] if c.attribute != best.attribute),
            default=0.0,
        )
        second_gain = max(second_gain, 0.0)

        epsilon = hoeffding_bound(
            self.gain_range, self.split_confidence, leaf.model.total_count
        )
        if best.gain <= 0:
            return
        if best.gain - second_gain > epsilon or epsilon < self.tie_threshold:
            self._split(leaf, parent, branch, best)

    def _split(
        self,
        leaf: LeafNode,
        parent: SplitNode | None,
        branch: int,
        candidate: SplitCandidate,
    ) -> None:
        numeric_uses = dict(leaf.numeric_uses)
        nominal_used = leaf.nominal_used
        if candidate.threshold is None:
            nominal_used = nominal_used | {candidate.attribute}
        else:
            numeric_uses[candidate.attribute] = numeric_uses.get(candidate.attribute, 0) + 1

        children: list[LeafNode | SplitNode] = [
            self._new_leaf(prior, numeric_uses, nominal_used)
            for prior in candidate.children
        ]
        node = SplitNode(candidate.attribute, candidate.threshold, children)

        self.n_leaves -= 1
        self.n_active_leaves -= 1
        self.n_split_nodes += 1
        if parent is None:
            self.root = node
        else:
            parent.children[branch] = node

        logger.debug(
            f"Split on attribute {candidate.attribute} "
            f"(threshold {candidate.threshold}, gain {candidate.gain:.4f}) "
            f"after {leaf.seen:.0f} instances"
        )

    def deactivate(self, leaf: LeafNode) -> None:
        """Drop a leaf's attribute statistics; its class counts freeze and it never splits"""
        if not leaf.active:
            return
        leaf.class_counts = leaf.class_counts.copy()
        leaf.model = None
        self.n_active_leaves -= 1

    def memory_estimate(self) -> int:
        """Deterministic model size in bytes (see the formula constants above)"""
        return (
            TREE_BYTES
            + SPLIT_NODE_BYTES * self.n_split_nodes
            + self._leaf_bytes * self.n_leaves
            + self._statistics_bytes * self.n_active_leaves
        )

    def prune(self, target_bytes: int) -> None:
        """
        Deactivate the least active leaves until the tree fits the target

        Leaves go in ascending order of instances seen, older leaves first on ties.

        Args:
            target_bytes (int): Memory the tree should fit into
        """
        if self.memory_estimate() <= target_bytes:
            return

        active = sorted(
            (leaf for leaf in self.leaves() if leaf.active),
            key=lambda leaf: (leaf.seen, leaf.created),
        )
        deactivated = 0
        for leaf in active:
            self.deactivate(leaf)
            deactivated += 1
            if self.memory_estimate() <= target_bytes:
                break

        logger.debug(
            f"Deactivated {deactivated} leaves, tree now {self.memory_estimate()} bytes "
            f"(target {target_bytes})"
        )
