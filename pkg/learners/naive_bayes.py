import logging
import math

import numpy as np
import numpy.typing as npt

from data_classes import Instance, StreamSchema

logger = logging.getLogger(__name__)

# Memory formula constants (bytes). A model allocates its statistics up front,
# so its estimate depends only on the schema:
#   NB_MODEL_BYTES + VALUE_BYTES * (p + 5·p·n_numeric + p·Σ cardinality)
# The five numeric statistics per class are count, mean, M2, min and max.
NB_MODEL_BYTES = 64
VALUE_BYTES = 8
NUMERIC_STATISTICS = 5

VARIANCE_FLOOR = 1e-9
LOG_2PI = math.log(2.0 * math.pi)


def attribute_statistics_bytes(schema: StreamSchema) -> int:
    """Bytes held by the per-class attribute statistics of one model"""
    p = schema.n_classes
    numeric = NUMERIC_STATISTICS * p * int(schema.numeric_index.size)
    nominal = p * int(schema.cardinalities.sum())
    return VALUE_BYTES * (numeric + nominal)


class NaiveBayesModel:
    """Incremental Naive Bayes with Gaussian numeric and Laplace-smoothed nominal likelihoods"""

    def __init__(self, schema: StreamSchema):
        self.schema = schema
        p = schema.n_classes
        n_numeric = schema.numeric_index.size

        self.class_counts = np.zeros(p)
        # running count / mean / M2 per class and numeric attribute (Welford)
        self.numeric_count = np.zeros((p, n_numeric))
        self.numeric_mean = np.zeros((p, n_numeric))
        self.numeric_m2 = np.zeros((p, n_numeric))
        self.numeric_min = np.full((p, n_numeric), np.inf)
        self.numeric_max = np.full((p, n_numeric), -np.inf)
        self.nominal_counts = [np.zeros((p, int(c))) for c in schema.cardinalities]

    @property
    def total_count(self) -> float:
        return float(self.class_counts.sum())

    def train_on(self, instance: Instance) -> None:
        """
        Add one instance to the sufficient statistics

        Args:
            instance (Instance): A schema-conforming instance
        """
        y = instance.label
        w = instance.weight
        if w == 0:
            return
        features = instance.features

        self.class_counts[y] += w

        if self.schema.numeric_index.size:
            x = features[self.schema.numeric_index]
            n_new = self.numeric_count[y] + w
            delta = x - self.numeric_mean[y]
            self.numeric_mean[y] += delta * (w / n_new)
            self.numeric_m2[y] += w * delta * (x - self.numeric_mean[y])
            self.numeric_count[y] = n_new
            np.minimum(self.numeric_min[y], x, out=self.numeric_min[y])
            np.maximum(self.numeric_max[y], x, out=self.numeric_max[y])

        for counts, attribute in zip(self.nominal_counts, self.schema.nominal_index):
            counts[y, int(features[attribute])] += w

    def variance(self) -> npt.NDArray[np.float64]:
        """Unbiased per-class variance of each numeric attribute, floored"""
        n = self.numeric_count
        with np.errstate(divide="ignore", invalid="ignore"):
            var = np.where(n > 1, self.numeric_m2 / (n - 1), 0.0)
        return np.maximum(var, VARIANCE_FLOOR)

    def log_joint(self, features: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """log P(c) + Σ log P(x_a | c) per class, -inf for unseen classes"""
        total = self.total_count
        seen = self.class_counts > 0
        out = np.full(self.schema.n_classes, -np.inf)
        if total == 0:
            return out

        log_joint = np.log(np.where(seen, self.class_counts, 1.0) / total)

        if self.schema.numeric_index.size:
            x = features[self.schema.numeric_index]
            var = self.variance()
            log_pdf = -0.5 * (LOG_2PI + np.log(var)) - (x - self.numeric_mean) ** 2 / (
                2.0 * var
            )
            log_joint += log_pdf.sum(axis=1)

        for counts, attribute, cardinality in zip(
            self.nominal_counts, self.schema.nominal_index, self.schema.cardinalities
        ):
            category = int(features[attribute])
            log_joint += np.log(
                (counts[:, category] + 1.0) / (self.class_counts + cardinality)
            )

        out[seen] = log_joint[seen]
        return out

    def score(self, features: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """
        Posterior-proportional scores, computed in the log domain

        Returns:
            ndarray: exp(log_joint - max), zeros for an empty model
        """
        log_joint = self.log_joint(features)
        if not np.any(np.isfinite(log_joint)):
            return np.zeros(self.schema.n_classes)
        return np.exp(log_joint - log_joint.max())

    def memory_estimate(self) -> int:
        return (
            NB_MODEL_BYTES
            + VALUE_BYTES * self.schema.n_classes
            + attribute_statistics_bytes(self.schema)
        )

    def prune(self, target_bytes: int) -> None:
        # Statistics are fixed-size; nothing can be released.
        logger.debug(
            f"Naive Bayes cannot shrink below {self.memory_estimate()} bytes "
            f"(target {target_bytes})"
        )
