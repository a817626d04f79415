"""Hybrid node model: quantizer for prototype generation, a separate
incremental classifier for prediction.

Local samples train both parts.  Prototypes received from peers are
treated as labeled samples for the predictor only, so the node's own
prototype set reflects just its local stream.  The predictor behind the
``IncrementalClassifier`` protocol is pluggable; the bundled stand-in is
an incremental Gaussian naive Bayes with Welford moment accumulators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import numpy as np

from .prototypes import DimensionMismatchError, Sample
from .xuilvq import XuIlvqModel

__all__ = ["IncrementalClassifier", "GaussianNaiveBayes", "HybridNodeModel"]

VARIANCE_FLOOR = 1e-9


@runtime_checkable
class IncrementalClassifier(Protocol):
    """Anything that can learn labeled samples one at a time and predict.

    ``predict`` must be side-effect free and may return None to abstain.
    """

    def learn(self, sample: Sample) -> None: ...

    def predict(self, features: np.ndarray) -> int | None: ...


class GaussianNaiveBayes:
    """Incremental Gaussian naive Bayes.

    Keeps per-class Welford accumulators (count, running mean, running sum
    of squared deviations) per feature.  Variances are floored at
    ``VARIANCE_FLOOR`` so single-sample classes stay usable.
    """

    def __init__(self) -> None:
        self._counts: dict[int, int] = {}
        self._means: dict[int, np.ndarray] = {}
        self._m2: dict[int, np.ndarray] = {}
        self._dimension: int | None = None

    @property
    def dimension(self) -> int | None:
        return self._dimension

    @property
    def total_count(self) -> int:
        return sum(self._counts.values())

    def class_count(self, label: int) -> int:
        return self._counts.get(label, 0)

    def learn(self, sample: Sample) -> None:
        x = np.asarray(sample.features, dtype=float)
        if self._dimension is None:
            self._dimension = x.shape[0]
        elif x.shape != (self._dimension,):
            raise DimensionMismatchError(
                f"sample has shape {x.shape}, classifier dimension is {self._dimension}"
            )
        label = int(sample.label)
        if label not in self._counts:
            self._counts[label] = 0
            self._means[label] = np.zeros(self._dimension)
            self._m2[label] = np.zeros(self._dimension)
        self._counts[label] += 1
        delta = x - self._means[label]
        self._means[label] += delta / self._counts[label]
        self._m2[label] += delta * (x - self._means[label])

    def mean_of(self, label: int) -> np.ndarray:
        return self._means[label].copy()

    def variance_of(self, label: int) -> np.ndarray:
        """Population variance per feature, floored."""
        count = self._counts[label]
        return np.maximum(self._m2[label] / count, VARIANCE_FLOOR)

    def predict(self, features: np.ndarray) -> int | None:
        if not self._counts:
            return None
        x = np.asarray(features, dtype=float)
        total = self.total_count
        best_label: int | None = None
        best_score = -math.inf
        for label in sorted(self._counts):
            var = self.variance_of(label)
            log_likelihood = -0.5 * float(
                np.sum(np.log(2.0 * math.pi * var) + (x - self._means[label]) ** 2 / var)
            )
            score = math.log(self._counts[label] / total) + log_likelihood
            if score > best_score:
                best_score = score
                best_label = label
        return best_label


@dataclass
class HybridNodeModel:
    """Prototype generator plus separate predictor for one node."""

    prototyper: XuIlvqModel
    predictor: IncrementalClassifier = field(default_factory=GaussianNaiveBayes)

    @property
    def dimension(self) -> int | None:
        return self.prototyper.dimension

    @property
    def prototype_count(self) -> int:
        return self.prototyper.prototype_count

    def learn(self, sample: Sample) -> None:
        """Route one local sample to both the prototyper and the predictor."""
        self.prototyper.learn_one(sample)
        self.predictor.learn(sample)

    def absorb_prototype(self, weights: np.ndarray, label: int) -> None:
        """Feed a received prototype to the predictor only."""
        self.predictor.learn(Sample(np.asarray(weights, dtype=float), int(label)))

    def predict(self, features: np.ndarray) -> int | None:
        return self.predictor.predict(features)

    def export_prototypes(self) -> list[tuple[np.ndarray, int]]:
        return self.prototyper.export_prototypes()

    def snapshot(self):
        return self.prototyper.snapshot()
