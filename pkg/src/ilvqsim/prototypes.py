"""Core domain types shared by every learner and protocol.

A ``Sample`` is a labeled feature vector from a data stream.  A
``Prototype`` is a synthetic labeled vector summarizing previously seen
samples; prototypes are linked by aged ``Edge``s into a ``PrototypeGraph``,
which is the state of the quantization learner and the payload of the
sharing protocols.

The graph stores prototypes as a struct-of-arrays (contiguous weight
matrix plus parallel label/win-count arrays) so that nearest-prototype
queries are single vectorized operations; the ``Prototype`` accessors
build plain objects on demand.  Rows are kept in ascending-id order,
which makes ``argmin`` tie-breaking equivalent to lowest-id tie-breaking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DimensionMismatchError",
    "UnknownPrototypeError",
    "Sample",
    "Prototype",
    "Edge",
    "PrototypeGraph",
    "distance",
    "neighbors",
]

_INITIAL_CAPACITY = 16


class DimensionMismatchError(ValueError):
    """A vector's dimension does not match its container's dimension."""


class UnknownPrototypeError(KeyError):
    """An operation referenced a prototype id that is not in the graph."""


@dataclass(frozen=True, eq=False)
class Sample:
    """One labeled observation: a real feature vector and a class id."""

    features: np.ndarray
    label: int

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "features", np.asarray(self.features, dtype=float)
        )

    @property
    def dimension(self) -> int:
        return int(self.features.shape[0])


@dataclass(eq=False)
class Prototype:
    """A labeled weight vector with its usage counter.

    ``win_count`` counts the points the prototype represents: it starts at
    1 for the founding sample and is incremented each time the prototype
    is selected as the winner.
    """

    id: int
    weights: np.ndarray
    label: int
    win_count: int = 1


@dataclass(frozen=True)
class Edge:
    """An unordered link between two prototypes, with an age counter.

    Endpoints are normalized so that ``a < b``.
    """

    a: int
    b: int
    age: int = 0


def distance(a: np.ndarray, b: np.ndarray) -> float:
    """Euclidean (L2) distance between two equal-dimension vectors.

    Raises:
        DimensionMismatchError: if the vectors differ in dimension.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatchError(
            f"cannot take distance between shapes {a.shape} and {b.shape}"
        )
    return float(math.sqrt(float(np.sum((a - b) ** 2))))


def neighbors(graph: "PrototypeGraph", prototype_id: int) -> set[int]:
    """Ids of all prototypes sharing an edge with ``prototype_id``."""
    return graph.neighbors(prototype_id)


def _edge_key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


class PrototypeGraph:
    """Prototypes plus aged edges between winner/runner-up pairs.

    Ids are monotonically increasing integers assigned at insertion and
    never reused.  All prototypes share one feature dimension.  The graph
    holds no self-edges and no duplicate edges; both invariants are
    enforced structurally and can be re-checked with :meth:`validate`.
    """

    def __init__(self, dimension: int) -> None:
        if dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {dimension}")
        self.dimension = int(dimension)
        self._n = 0
        self._weights = np.empty((_INITIAL_CAPACITY, self.dimension), dtype=float)
        self._labels = np.empty(_INITIAL_CAPACITY, dtype=np.int64)
        self._wins = np.empty(_INITIAL_CAPACITY, dtype=np.int64)
        self._ids = np.empty(_INITIAL_CAPACITY, dtype=np.int64)
        self._row_of: dict[int, int] = {}
        self._adjacency: dict[int, set[int]] = {}
        self._edge_ages: dict[tuple[int, int], int] = {}
        self._label_counts: dict[int, int] = {}
        self._next_id = 0

    # -- prototype accessors -------------------------------------------------

    def __len__(self) -> int:
        return self._n

    def __contains__(self, prototype_id: int) -> bool:
        return prototype_id in self._row_of

    def prototype_ids(self) -> list[int]:
        """All live prototype ids, ascending."""
        return [int(i) for i in self._ids[: self._n]]

    def prototype(self, prototype_id: int) -> Prototype:
        """A detached copy of one prototype."""
        row = self._require(prototype_id)
        return Prototype(
            id=prototype_id,
            weights=self._weights[row].copy(),
            label=int(self._labels[row]),
            win_count=int(self._wins[row]),
        )

    def add_prototype(self, weights: np.ndarray, label: int, win_count: int = 1) -> int:
        """Insert a new prototype and return its id."""
        w = np.asarray(weights, dtype=float)
        if w.shape != (self.dimension,):
            raise DimensionMismatchError(
                f"prototype has shape {w.shape}, graph dimension is {self.dimension}"
            )
        if self._n == self._weights.shape[0]:
            self._grow()
        row = self._n
        self._weights[row] = w
        self._labels[row] = int(label)
        self._wins[row] = int(win_count)
        pid = self._next_id
        self._ids[row] = pid
        self._next_id += 1
        self._n += 1
        self._row_of[pid] = row
        self._adjacency[pid] = set()
        self._label_counts[int(label)] = self._label_counts.get(int(label), 0) + 1
        return pid

    def remove_prototypes(self, prototype_ids) -> None:
        """Delete a batch of prototypes and every edge incident to them."""
        doomed = set(prototype_ids)
        if not doomed:
            return
        for pid in doomed:
            self._require(pid)
        for pid in doomed:
            for other in list(self._adjacency[pid]):
                self._adjacency[other].discard(pid)
                self._edge_ages.pop(_edge_key(pid, other), None)
            del self._adjacency[pid]
            row = self._row_of.pop(pid)
            label = int(self._labels[row])
            self._label_counts[label] -= 1
            if self._label_counts[label] == 0:
                del self._label_counts[label]
        keep = np.array(
            [int(i) not in doomed for i in self._ids[: self._n]], dtype=bool
        )
        kept = int(keep.sum())
        self._weights[:kept] = self._weights[: self._n][keep]
        self._labels[:kept] = self._labels[: self._n][keep]
        self._wins[:kept] = self._wins[: self._n][keep]
        self._ids[:kept] = self._ids[: self._n][keep]
        self._n = kept
        self._row_of = {int(pid): row for row, pid in enumerate(self._ids[: self._n])}

    def label_of(self, prototype_id: int) -> int:
        return int(self._labels[self._require(prototype_id)])

    def win_count(self, prototype_id: int) -> int:
        return int(self._wins[self._require(prototype_id)])

    def add_win(self, prototype_id: int) -> int:
        """Increment and return the prototype's win count."""
        row = self._require(prototype_id)
        self._wins[row] += 1
        return int(self._wins[row])

    def mean_win_count(self) -> float:
        if self._n == 0:
            return 0.0
        return float(self._wins[: self._n].mean())

    def has_label(self, label: int) -> bool:
        return int(label) in self._label_counts

    def labels_present(self) -> set[int]:
        return set(self._label_counts)

    def weight_view(self, prototype_id: int) -> np.ndarray:
        """Read-only view of a prototype's weights (do not mutate)."""
        return self._weights[self._require(prototype_id)]

    def set_weight(self, prototype_id: int, weights: np.ndarray) -> None:
        row = self._require(prototype_id)
        self._weights[row] = weights

    def weight_matrix(self) -> np.ndarray:
        """Live (n, dimension) weight matrix view, rows in ascending-id order."""
        return self._weights[: self._n]

    def label_array(self) -> np.ndarray:
        return self._labels[: self._n]

    def id_array(self) -> np.ndarray:
        return self._ids[: self._n]

    def distances_to(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Euclidean distance from ``x`` to every prototype.

        Returns ``(ids, distances)`` aligned arrays in ascending-id order.
        """
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dimension,):
            raise DimensionMismatchError(
                f"query has shape {x.shape}, graph dimension is {self.dimension}"
            )
        diff = self._weights[: self._n] - x
        return self._ids[: self._n], np.sqrt(np.einsum("ij,ij->i", diff, diff))

    # -- edge accessors ------------------------------------------------------

    def set_edge(self, a: int, b: int, age: int = 0) -> None:
        """Create the edge (a, b), or reset its age if it already exists."""
        if a == b:
            raise ValueError(f"self-edge on prototype {a}")
        self._require(a)
        self._require(b)
        key = _edge_key(a, b)
        if key not in self._edge_ages:
            self._adjacency[a].add(b)
            self._adjacency[b].add(a)
        self._edge_ages[key] = int(age)

    def has_edge(self, a: int, b: int) -> bool:
        return _edge_key(a, b) in self._edge_ages

    def edge_age(self, a: int, b: int) -> int:
        return self._edge_ages[_edge_key(a, b)]

    def remove_edge(self, a: int, b: int) -> None:
        key = _edge_key(a, b)
        del self._edge_ages[key]
        self._adjacency[a].discard(b)
        self._adjacency[b].discard(a)

    def edges(self) -> list[Edge]:
        """Detached, sorted list of all edges."""
        return [
            Edge(a, b, age)
            for (a, b), age in sorted(self._edge_ages.items())
        ]

    def edge_count(self) -> int:
        return len(self._edge_ages)

    def neighbors(self, prototype_id: int) -> set[int]:
        self._require(prototype_id)
        return set(self._adjacency[prototype_id])

    def degree(self, prototype_id: int) -> int:
        self._require(prototype_id)
        return len(self._adjacency[prototype_id])

    def increment_incident_ages(self, prototype_id: int) -> None:
        """Age every edge incident to one prototype by 1."""
        self._require(prototype_id)
        for other in self._adjacency[prototype_id]:
            key = _edge_key(prototype_id, other)
            self._edge_ages[key] += 1

    def prune_incident_edges(self, prototype_id: int, max_age: int) -> int:
        """Drop edges incident to one prototype whose age reached ``max_age``."""
        self._require(prototype_id)
        stale = [
            other
            for other in self._adjacency[prototype_id]
            if self._edge_ages[_edge_key(prototype_id, other)] >= max_age
        ]
        for other in stale:
            self.remove_edge(prototype_id, other)
        return len(stale)

    # -- integrity and serialization ------------------------------------------

    def validate(self, max_age: int | None = None) -> None:
        """Walk the whole structure and raise ``ValueError`` on any violation."""
        problems: list[str] = []
        ids = self._ids[: self._n]
        if len(set(int(i) for i in ids)) != self._n:
            problems.append("duplicate prototype ids")
        if any(int(ids[i]) >= int(ids[i + 1]) for i in range(self._n - 1)):
            problems.append("rows not in ascending-id order")
        for pid, row in self._row_of.items():
            if not 0 <= row < self._n or int(ids[row]) != pid:
                problems.append(f"row index broken for prototype {pid}")
        if not np.all(np.isfinite(self._weights[: self._n])):
            problems.append("non-finite prototype weights")
        for (a, b), age in self._edge_ages.items():
            if a == b:
                problems.append(f"self-edge on {a}")
            if a not in self._row_of or b not in self._row_of:
                problems.append(f"edge ({a},{b}) has missing endpoint")
            if a > b:
                problems.append(f"edge key ({a},{b}) not normalized")
            if age < 0:
                problems.append(f"edge ({a},{b}) has negative age")
            if max_age is not None and age >= max_age:
                problems.append(f"edge ({a},{b}) age {age} >= {max_age}")
        for pid, adj in self._adjacency.items():
            for other in adj:
                if _edge_key(pid, other) not in self._edge_ages:
                    problems.append(f"adjacency ({pid},{other}) without edge record")
        for pid in self._row_of:
            if pid not in self._adjacency:
                problems.append(f"prototype {pid} missing adjacency set")
        counted: dict[int, int] = {}
        for label in self._labels[: self._n]:
            counted[int(label)] = counted.get(int(label), 0) + 1
        if counted != self._label_counts:
            problems.append("label counts out of sync")
        if problems:
            raise ValueError("; ".join(problems))

    def to_dict(self) -> dict:
        """JSON-ready snapshot: prototypes and edges in canonical order."""
        return {
            "dimension": self.dimension,
            "next_id": self._next_id,
            "prototypes": [
                {
                    "id": int(self._ids[row]),
                    "weights": [float(v) for v in self._weights[row]],
                    "label": int(self._labels[row]),
                    "win_count": int(self._wins[row]),
                }
                for row in range(self._n)
            ],
            "edges": [
                {"a": a, "b": b, "age": age}
                for (a, b), age in sorted(self._edge_ages.items())
            ],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "PrototypeGraph":
        graph = cls(payload["dimension"])
        for proto in payload["prototypes"]:
            graph._next_id = proto["id"]
            graph.add_prototype(
                np.asarray(proto["weights"], dtype=float),
                proto["label"],
                proto["win_count"],
            )
        graph._next_id = payload["next_id"]
        for edge in payload["edges"]:
            graph.set_edge(edge["a"], edge["b"], edge["age"])
        return graph

    # -- internals -------------------------------------------------------------

    def _require(self, prototype_id: int) -> int:
        row = self._row_of.get(prototype_id)
        if row is None:
            raise UnknownPrototypeError(prototype_id)
        return row

    def _grow(self) -> None:
        capacity = max(_INITIAL_CAPACITY, 2 * self._weights.shape[0])
        weights = np.empty((capacity, self.dimension), dtype=float)
        weights[: self._n] = self._weights[: self._n]
        self._weights = weights
        for name in ("_labels", "_wins", "_ids"):
            arr = np.empty(capacity, dtype=np.int64)
            arr[: self._n] = getattr(self, name)[: self._n]
            setattr(self, name, arr)
