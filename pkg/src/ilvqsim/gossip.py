"""Decentralised prototype-sharing protocols and inbox semantics.

Two per-iteration sharing rules: a context-free random rule (share the
whole prototype set with a random peer subset) and a relative-threshold
rule that shares only when the sender outperforms the median of the
sampled peers, and then only toward the peers below that median.  Both
fire with one uniform draw per iteration against the share probability.

Message payloads are full prototype snapshots; receivers queue them in a
FIFO inbox that is drained completely before the owner's next sample.
"""

from __future__ import annotations

import csv
import statistics
from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .metrics import prequential_f1

__all__ = [
    "ShareConfig",
    "Inbox",
    "random_share_step",
    "relative_threshold_step",
    "drain_inbox",
    "update_perf",
    "write_trace_csv",
]

# One performance score per node id, shared via the simulation's oracle
# registry (a real deployment would disseminate these over the network).
PerfTable = dict


@dataclass(frozen=True)
class ShareConfig:
    """Sharing probability per iteration and peer subset size."""

    share_prob: float
    fanout: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.share_prob <= 1.0:
            raise ValueError(
                f"share_prob must be in [0, 1], got {self.share_prob}"
            )
        if self.fanout < 1:
            raise ValueError(f"fanout must be >= 1, got {self.fanout}")

    def validate_for(self, n_nodes: int) -> None:
        if self.fanout > n_nodes - 1:
            raise ValueError(
                f"fanout {self.fanout} exceeds peer count {n_nodes - 1}"
            )


class Inbox:
    """FIFO queue of received (weights, label) prototypes.

    Snapshots are queued whole and consumed in arrival order; ``dropped``
    counts prototypes discarded for a dimension mismatch.
    """

    def __init__(self) -> None:
        self._queue: deque = deque()
        self._pending = 0
        self.dropped = 0

    def push(self, snapshot) -> None:
        self._queue.append(snapshot)
        self._pending += len(snapshot)

    def __len__(self) -> int:
        return self._pending

    def pop_snapshot(self):
        snapshot = self._queue.popleft()
        self._pending -= len(snapshot)
        return snapshot

    def has_snapshots(self) -> bool:
        return bool(self._queue)


def random_share_step(
    self_id: int,
    protos,
    cfg: ShareConfig,
    peers: Sequence[int],
    rng: np.random.Generator,
) -> list[tuple[int, object]]:
    """Context-free sharing: with probability ``share_prob``, send the
    prototype set to ``fanout`` peers drawn without replacement.

    Returns one (destination, payload) message per selected peer; the
    payload is the same snapshot object for all of them.
    """
    if rng.random() >= cfg.share_prob:
        return []
    chosen = rng.choice(len(peers), size=cfg.fanout, replace=False)
    return [(int(peers[i]), protos) for i in chosen]


def relative_threshold_step(
    self_id: int,
    protos,
    cfg: ShareConfig,
    peers: Sequence[int],
    perf: Mapping[int, float],
    rng: np.random.Generator,
) -> list[tuple[int, object]]:
    """Performance-aware sharing: fire with probability ``share_prob``,
    sample ``fanout`` peers, and send only when the local score beats the
    median of the sampled peers' scores — and then only to the sampled
    peers strictly below that median.
    """
    if rng.random() >= cfg.share_prob:
        return []
    chosen = rng.choice(len(peers), size=cfg.fanout, replace=False)
    sampled = [int(peers[i]) for i in chosen]
    median = statistics.median(perf[p] for p in sampled)
    if perf[self_id] <= median:
        return []
    return [(p, protos) for p in sampled if perf[p] < median]


def drain_inbox(model, inbox: Inbox) -> int:
    """Feed every queued prototype to the node's learner, FIFO.

    Prototypes whose dimension does not match the model are dropped and
    counted in ``inbox.dropped``; the simulation carries on.  Returns the
    number of prototypes actually processed.
    """
    processed = 0
    while inbox.has_snapshots():
        snapshot = inbox.pop_snapshot()
        expected = model.dimension
        if (
            len(snapshot) > 0
            and expected is not None
            and snapshot.dimension != expected
        ):
            inbox.dropped += len(snapshot)
            continue
        for weights, label in snapshot:
            model.absorb_prototype(weights, label)
            processed += 1
    return processed


def update_perf(
    perf: PerfTable,
    node_id: int,
    window: Sequence[tuple[int | None, int]],
    n_classes: int = 2,
) -> float:
    """Refresh one node's score: prequential F-score over its recent window.

    Abstentions count as wrong; an empty window scores 0.  The new score is
    stored in ``perf`` and also returned.
    """
    score = prequential_f1(window, n_classes=n_classes)
    perf[node_id] = score
    return score


def write_trace_csv(trace: Sequence, path) -> None:
    """Dump a message trace as ``step,sender,receiver,prototype_count`` rows."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["step", "sender", "receiver", "prototype_count"])
        for record in trace:
            writer.writerow(
                [record.step, record.sender, record.receiver, record.n_prototypes]
            )
