"""XuILVQ: incremental learning vector quantization with adaptive insertion.

The learner keeps a graph of labeled prototypes.  Each training sample
either becomes a new prototype (when its class is unseen or it falls
outside the adaptive distance thresholds of the two nearest prototypes)
or pulls/pushes the winner and the winner's neighbors along the signed
quantization update.  Edges link winner/runner-up pairs and age out;
every ``denoise_period`` steps, prototypes that lost their neighborhood
or their usage share are deleted, which bounds model growth on
stationary streams.

Prediction is a k-nearest-prototype vote weighted by inverse distance,
with an exact-match short circuit.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from .prototypes import (
    DimensionMismatchError,
    PrototypeGraph,
    Sample,
)

__all__ = [
    "LearnOutcome",
    "XuIlvqParams",
    "XuIlvqModel",
    "compute_threshold",
]


class LearnOutcome(enum.Enum):
    """What a single training step did to the model."""

    BUFFERED_INIT = "buffered-init"
    INSERTED = "inserted-new-prototype"
    UPDATED = "updated-winner"


@dataclass(frozen=True)
class XuIlvqParams:
    """Learner hyperparameters.

    Attributes:
        age_old: edge age at which an edge expires.
        denoise_period: training steps between prototype-pruning passes.
        k: number of prototypes consulted by prediction.
        winner_rate: learning rate for the winner; None selects the
            harmonic rule 1/M(winner), which decays as the winner
            accumulates points.
        neighbor_rate: learning rate for the winner's neighbors; None
            selects 1/(100 * M(winner)).
    """

    age_old: int = 400
    denoise_period: int = 600
    k: int = 3
    winner_rate: float | None = None
    neighbor_rate: float | None = None

    def __post_init__(self) -> None:
        if self.age_old < 1:
            raise ValueError(f"age_old must be >= 1, got {self.age_old}")
        if self.denoise_period < 1:
            raise ValueError(
                f"denoise_period must be >= 1, got {self.denoise_period}"
            )
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        for name in ("winner_rate", "neighbor_rate"):
            value = getattr(self, name)
            if value is not None and not 0 < value <= 1:
                raise ValueError(f"{name} must be in (0, 1], got {value}")

    def to_dict(self) -> dict:
        return {
            "age_old": self.age_old,
            "denoise_period": self.denoise_period,
            "k": self.k,
            "winner_rate": self.winner_rate,
            "neighbor_rate": self.neighbor_rate,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "XuIlvqParams":
        return cls(**payload)


def compute_threshold(graph: PrototypeGraph, prototype_id: int) -> float | None:
    """Adaptive insertion threshold of one prototype, from its neighborhood.

    Let delta be the mean distance to same-class neighbors and T the
    minimum distance to different-class neighbors.  Cases:

    * no neighbors at all: None (no local geometry, no threshold);
    * only different-class neighbors: the maximum distance to them;
    * only same-class neighbors: the minimum distance to them;
    * both: while T < delta, the nearest different-class neighbor is
      excluded and T is recomputed over the remaining ones; if they are
      all excluded before T >= delta, delta itself is returned.
    """
    row = graph._require(prototype_id)
    return _threshold_for_row(graph, prototype_id, row)


def _threshold_for_row(
    graph: PrototypeGraph, prototype_id: int, row: int
) -> float | None:
    neighbor_ids = graph._adjacency[prototype_id]
    if not neighbor_ids:
        return None
    row_of = graph._row_of
    rows = [row_of[nb] for nb in neighbor_ids]
    diff = graph._weights[rows] - graph._weights[row]
    dists = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    same_mask = graph._labels[rows] == graph._labels[row]
    same = dists[same_mask]
    other = dists[~same_mask]
    if same.size == 0:
        return float(other.max())
    if other.size == 0:
        return float(same.min())
    delta = float(same.mean())
    # Exclude nearest different-class neighbors until the threshold
    # reaches the same-class spread; exhausted means delta itself.
    viable = other[other >= delta]
    if viable.size:
        return float(viable.min())
    return delta


class XuIlvqModel:
    """One incremental prototype learner instance.

    The model is single-owner: it is not internally synchronized and must
    not be shared across threads while in use.  Given the same parameters
    and the same sample sequence, two models end in bit-identical states.
    """

    def __init__(
        self,
        params: XuIlvqParams | None = None,
        dimension: int | None = None,
    ) -> None:
        self.params = params or XuIlvqParams()
        self.graph: PrototypeGraph | None = (
            PrototypeGraph(dimension) if dimension is not None else None
        )
        self.step_index = 0

    @property
    def dimension(self) -> int | None:
        return self.graph.dimension if self.graph is not None else None

    @property
    def prototype_count(self) -> int:
        return len(self.graph) if self.graph is not None else 0

    # -- training ---------------------------------------------------------

    def learn_one(self, sample: Sample) -> LearnOutcome:
        """Process one labeled sample and return what happened."""
        return self._learn(sample.features, sample.label)

    def absorb_prototype(self, weights: np.ndarray, label: int) -> LearnOutcome:
        """Feed a received prototype through the same path as a sample."""
        return self._learn(np.asarray(weights, dtype=float), int(label))

    def _learn(self, x: np.ndarray, label: int) -> LearnOutcome:
        x = np.asarray(x, dtype=float)
        if self.graph is None:
            self.graph = PrototypeGraph(x.shape[0])
        graph = self.graph
        if x.shape != (graph.dimension,):
            raise DimensionMismatchError(
                f"sample has shape {x.shape}, model dimension is {graph.dimension}"
            )
        self.step_index += 1

        n = graph._n
        if n < 2:
            graph.add_prototype(x, label)
            return LearnOutcome.BUFFERED_INIT

        weights = graph._weights[:n]
        diff = weights - x
        sq = np.einsum("ij,ij->i", diff, diff)
        row1 = int(np.argmin(sq))
        d1_sq = sq[row1]
        sq[row1] = np.inf
        row2 = int(np.argmin(sq))
        d1 = float(np.sqrt(d1_sq))
        d2 = float(np.sqrt(sq[row2]))
        winner = int(graph._ids[row1])
        runner_up = int(graph._ids[row2])

        if self._should_insert(graph, label, winner, runner_up, row1, row2, d1, d2):
            graph.add_prototype(x, label)
            return LearnOutcome.INSERTED

        graph.set_edge(winner, runner_up, age=0)
        graph.increment_incident_ages(winner)
        wins = graph.add_win(winner)
        eta1 = self.params.winner_rate
        if eta1 is None:
            eta1 = 1.0 / wins
        eta2 = self.params.neighbor_rate
        if eta2 is None:
            eta2 = 1.0 / (100.0 * wins)

        weights = graph._weights  # add_win cannot grow storage, view is safe
        row_of = graph._row_of
        labels = graph._labels
        w1 = weights[row1]
        if int(labels[row1]) == label:
            weights[row1] = w1 + eta1 * (x - w1)
            pull = -1.0  # push different-class neighbors away
            neighbor_rows = [
                row_of[nb]
                for nb in graph._adjacency[winner]
                if labels[row_of[nb]] != label
            ]
        else:
            weights[row1] = w1 - eta1 * (x - w1)
            pull = 1.0  # pull same-class neighbors toward the sample
            neighbor_rows = [
                row_of[nb]
                for nb in graph._adjacency[winner]
                if labels[row_of[nb]] == label
            ]
        if neighbor_rows:
            rows = np.array(neighbor_rows)
            weights[rows] += pull * eta2 * (x - weights[rows])

        graph.prune_incident_edges(winner, self.params.age_old)
        if self.step_index % self.params.denoise_period == 0:
            self.denoise()
        return LearnOutcome.UPDATED

    def _should_insert(
        self,
        graph: PrototypeGraph,
        label: int,
        winner: int,
        runner_up: int,
        row1: int,
        row2: int,
        d1: float,
        d2: float,
    ) -> bool:
        if label not in graph._label_counts:
            return True
        # A winner without neighbors falls back to its nearest-prototype
        # distance as the threshold, so samples beyond the local scale still
        # become prototypes instead of dragging existing ones around.  An
        # unwired runner-up has no receptive field and contributes no
        # insertion evidence.
        t1 = _threshold_for_row(graph, winner, row1)
        if t1 is None:
            t1 = self._nearest_other_distance(graph, row1)
        if d1 > t1:
            return True
        t2 = _threshold_for_row(graph, runner_up, row2)
        return t2 is not None and d2 > t2

    @staticmethod
    def _nearest_other_distance(graph: PrototypeGraph, row: int) -> float:
        weights = graph._weights[: graph._n]
        diff = weights - weights[row]
        sq = np.einsum("ij,ij->i", diff, diff)
        sq[row] = np.inf
        return float(np.sqrt(sq.min()))

    def denoise(self) -> int:
        """Delete neighbor-less and under-used prototypes; return the count.

        Two passes: first drop every prototype with no neighbors, then drop
        prototypes left with exactly one neighbor whose win count is below
        half the mean win count of the remaining prototypes.
        """
        graph = self.graph
        if graph is None or len(graph) == 0:
            return 0
        adjacency = graph._adjacency
        isolated = [pid for pid, nbs in adjacency.items() if not nbs]
        graph.remove_prototypes(isolated)
        removed = len(isolated)
        if len(graph) > 0:
            cutoff = 0.5 * graph.mean_win_count()
            row_of = graph._row_of
            wins = graph._wins
            sparse = [
                pid
                for pid, nbs in adjacency.items()
                if len(nbs) == 1 and wins[row_of[pid]] < cutoff
            ]
            graph.remove_prototypes(sparse)
            removed += len(sparse)
        return removed

    # -- prediction ---------------------------------------------------------

    def predict_one(self, x: np.ndarray) -> int | None:
        """Predicted class for a feature vector, or None when the model is empty.

        The k nearest prototypes vote with weight 1/distance; a prototype at
        distance exactly zero decides immediately.  The scores go through a
        softmax (which keeps the argmax) and ties break toward the lowest
        class id.
        """
        graph = self.graph
        if graph is None or len(graph) == 0:
            return None
        ids, dists = graph.distances_to(np.asarray(x, dtype=float))
        k = min(self.params.k, len(graph))
        order = np.lexsort((ids, dists))[:k]
        nearest_row = int(order[0])
        if dists[nearest_row] == 0.0:
            return int(graph.label_array()[nearest_row])
        labels = graph.label_array()
        scores = np.zeros(int(labels[order].max()) + 1, dtype=float)
        for row in order:
            scores[int(labels[row])] += 1.0 / float(dists[row])
        shifted = np.exp(scores - scores.max())
        softmax = shifted / shifted.sum()
        return int(np.argmax(softmax))

    # -- snapshots and persistence -------------------------------------------

    def export_prototypes(self) -> list[tuple[np.ndarray, int]]:
        """Detached (weights, label) copies of all prototypes, ascending id."""
        graph = self.graph
        if graph is None:
            return []
        weights = graph.weight_matrix()
        labels = graph.label_array()
        return [
            (weights[row].copy(), int(labels[row])) for row in range(len(graph))
        ]

    def snapshot(self) -> "PrototypeSnapshot":
        """Detached matrix-form copy of the prototype set (cheap to share)."""
        graph = self.graph
        if graph is None:
            return PrototypeSnapshot(np.empty((0, 0)), np.empty(0, dtype=np.int64))
        return PrototypeSnapshot(
            graph.weight_matrix().copy(), graph.label_array().copy()
        )

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "step_index": self.step_index,
            "graph": self.graph.to_dict() if self.graph is not None else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, payload: dict) -> "XuIlvqModel":
        model = cls(params=XuIlvqParams.from_dict(payload["params"]))
        model.step_index = payload["step_index"]
        if payload["graph"] is not None:
            model.graph = PrototypeGraph.from_dict(payload["graph"])
        return model

    @classmethod
    def from_json(cls, text: str) -> "XuIlvqModel":
        return cls.from_dict(json.loads(text))


class PrototypeSnapshot:
    """An immutable batch of (weights, label) prototypes.

    Behaves as a sequence of (vector, label) pairs; stores one matrix so
    that taking and queuing snapshots stays cheap on the simulation's hot
    path.
    """

    __slots__ = ("weights", "labels")

    def __init__(self, weights: np.ndarray, labels: np.ndarray) -> None:
        self.weights = weights
        self.labels = labels

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    def __iter__(self):
        for row in range(len(self)):
            yield self.weights[row], int(self.labels[row])

    @property
    def dimension(self) -> int:
        return int(self.weights.shape[1]) if len(self) else 0
