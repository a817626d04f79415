"""Deterministic multi-node simulation of collaborative stream learning.

The simulated network is a complete graph.  An ordered dataset is split
into disjoint, order-preserving partitions (one per node) by a seeded
random interleaving; the node with the smallest partition is the tagged
node whose learning curve measures the benefit of sharing.

Scheduling is synchronous round-robin by node id.  On its turn a node
pops its next sample, predicts before training (prequential scoring),
runs its sharing-protocol step (messages land in destination inboxes
immediately), and drains its own inbox.  Nodes whose streams are
exhausted stop generating traffic but keep receiving and draining.  A
run is a pure function of (config, dataset): randomness comes from one
master seed, split into one stream for partitioning plus one per node.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from collections import deque
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np

from .gossip import (
    Inbox,
    ShareConfig,
    drain_inbox,
    random_share_step,
    relative_threshold_step,
    update_perf,
)
from .hybrid import GaussianNaiveBayes, HybridNodeModel
from .metrics import convergence_time, f1 as f1_score, ConfusionCounts
from .prototypes import Sample
from .xuilvq import XuIlvqModel, XuIlvqParams

__all__ = [
    "ConfigError",
    "SimConfig",
    "MessageRecord",
    "NodeResult",
    "RunResult",
    "AggregateResult",
    "SweepRow",
    "partition_stream",
    "partition_for_config",
    "run_simulation",
    "run_centralized",
    "replicate",
    "sweep_t",
    "write_sweep_csv",
    "read_sweep_csv",
]

PROTOCOLS = ("none", "random", "relative-threshold")
MODES = ("fully-ilvq", "hybrid")

# 95% two-sided normal quantile, for confidence intervals over replications.
_Z_95 = 1.959963984540054


class ConfigError(ValueError):
    """An experiment configuration that cannot be run."""


class MessageRecord(NamedTuple):
    """One point-to-point prototype transfer in the trace."""

    step: int
    sender: int
    receiver: int
    n_prototypes: int


@dataclass(frozen=True)
class SimConfig:
    """Full description of one simulated experiment."""

    n_nodes: int
    partition_sizes: tuple[int, ...]
    protocol: str = "none"
    share: ShareConfig | None = None
    mode: str = "fully-ilvq"
    learner_params: XuIlvqParams = field(default_factory=XuIlvqParams)
    perf_window: int = 50
    seed: int = 0
    replications: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "partition_sizes", tuple(int(s) for s in self.partition_sizes)
        )

    def validate(self, dataset_size: int) -> None:
        if self.n_nodes < 1:
            raise ConfigError(f"n_nodes must be >= 1, got {self.n_nodes}")
        if len(self.partition_sizes) != self.n_nodes:
            raise ConfigError(
                f"{self.n_nodes} nodes but {len(self.partition_sizes)} partition sizes"
            )
        if any(size < 1 for size in self.partition_sizes):
            raise ConfigError("partition sizes must be positive")
        if sum(self.partition_sizes) > dataset_size:
            raise ConfigError(
                f"partitions need {sum(self.partition_sizes)} samples, "
                f"dataset has {dataset_size}"
            )
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"unknown protocol {self.protocol!r}")
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.protocol != "none":
            if self.share is None:
                raise ConfigError(f"protocol {self.protocol!r} needs a share config")
            try:
                self.share.validate_for(self.n_nodes)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        if self.perf_window < 1:
            raise ConfigError(f"perf_window must be >= 1, got {self.perf_window}")
        if self.replications < 1:
            raise ConfigError(
                f"replications must be >= 1, got {self.replications}"
            )

    @property
    def tagged_node(self) -> int:
        """The node with the smallest partition (lowest id wins ties)."""
        return int(np.argmin(self.partition_sizes))


def partition_stream(
    dataset: Sequence[Sample],
    sizes: Sequence[int],
    rng: np.random.Generator,
) -> list[list[Sample]]:
    """Split the head of an ordered stream into per-node subsequences.

    Each of the first sum(sizes) stream positions is assigned to exactly
    one node by a seeded random interleaving constrained to the requested
    sizes, so partitions are disjoint and every partition preserves the
    original relative order of its samples.
    """
    total = sum(sizes)
    if total > len(dataset):
        raise ConfigError(
            f"partitions need {total} samples, dataset has {len(dataset)}"
        )
    owners = np.repeat(np.arange(len(sizes)), sizes)
    rng.shuffle(owners)
    parts: list[list[Sample]] = [[] for _ in sizes]
    for position, owner in enumerate(owners):
        parts[owner].append(dataset[position])
    return parts


def _spawn_rngs(seed: int, n_nodes: int):
    """One partition generator plus one generator per node, from one seed."""
    children = np.random.SeedSequence(seed).spawn(n_nodes + 1)
    partition_rng = np.random.default_rng(children[0])
    node_rngs = [np.random.default_rng(child) for child in children[1:]]
    return partition_rng, node_rngs


def partition_for_config(
    cfg: SimConfig, dataset: Sequence[Sample]
) -> list[list[Sample]]:
    """The exact partition a simulation of ``cfg`` would use."""
    partition_rng, _ = _spawn_rngs(cfg.seed, cfg.n_nodes)
    return partition_stream(dataset, cfg.partition_sizes, partition_rng)


class _PrequentialTracker:
    """Cumulative prequential confusion bookkeeping for one node.

    Keeps per-class tp/fp/fn for the cumulative F-score plus the
    designated-positive-class tallies (with explicit tn and abstain
    counts) that make sample conservation checkable.
    """

    def __init__(self, n_classes: int) -> None:
        self.n_classes = n_classes
        self.tp = [0] * n_classes
        self.fp = [0] * n_classes
        self.fn = [0] * n_classes
        self._pos = {"tp": 0, "fp": 0, "fn": 0, "tn": 0, "abstains": 0}
        self.processed = 0

    def record(self, predicted: int | None, actual: int) -> None:
        self.processed += 1
        pos = self._pos
        if predicted is None:
            # Scored as wrong for F1 purposes, tallied apart for conservation.
            self.fn[actual] += 1
            pos["abstains"] += 1
            return
        if predicted == actual:
            self.tp[actual] += 1
        else:
            self.fp[predicted] += 1
            self.fn[actual] += 1
        if actual == 1:
            if predicted == 1:
                pos["tp"] += 1
            else:
                pos["fn"] += 1
        elif predicted == 1:
            pos["fp"] += 1
        else:
            pos["tn"] += 1

    def cumulative_f1(self) -> float:
        if self.n_classes == 2:
            return f1_score(
                ConfusionCounts(self.tp[1], self.fp[1], self.fn[1])
            )
        total = 0.0
        for c in range(self.n_classes):
            total += f1_score(ConfusionCounts(self.tp[c], self.fp[c], self.fn[c]))
        return total / self.n_classes

    def positive_tallies(self) -> dict[str, int]:
        """Counts against designated positive class 1; abstains separate."""
        return dict(self._pos)


class _NodeRuntime:
    """Mutable per-node state while a simulation is running."""

    def __init__(
        self,
        node_id: int,
        stream: list[Sample],
        cfg: SimConfig,
        n_classes: int,
    ) -> None:
        self.node_id = node_id
        self.stream = stream
        self.cursor = 0
        if cfg.mode == "hybrid":
            self.model: XuIlvqModel | HybridNodeModel = HybridNodeModel(
                prototyper=XuIlvqModel(cfg.learner_params),
                predictor=GaussianNaiveBayes(),
            )
            self._predict = self.model.predict
            self._learn = self.model.learn
        else:
            self.model = XuIlvqModel(cfg.learner_params)
            self._predict = self.model.predict_one
            self._learn = self.model.learn_one
        self.inbox = Inbox()
        self.window: deque = deque(maxlen=cfg.perf_window)
        self.tracker = _PrequentialTracker(n_classes)
        self.f1_windowed: list[float] = []
        self.f1_cumulative: list[float] = []
        self.prototype_counts: list[int] = []
        self.messages_sent = 0
        self.messages_received = 0
        self.bytes_sent = 0
        self.prototypes_received = 0

    @property
    def exhausted(self) -> bool:
        return self.cursor >= len(self.stream)


@dataclass(frozen=True)
class NodeResult:
    """Everything measured about one node during a run."""

    node_id: int
    samples_processed: int
    final_f1: float
    final_f1_cumulative: float
    convergence_step: int | None
    f1_windowed: tuple[float, ...]
    f1_cumulative: tuple[float, ...]
    prototype_counts: tuple[int, ...]
    messages_sent: int
    messages_received: int
    bytes_sent: int
    prototypes_received: int
    prototypes_dropped: int
    tallies: dict

    def to_dict(self) -> dict:
        return {
            "node_id": self.node_id,
            "samples_processed": self.samples_processed,
            "final_f1": self.final_f1,
            "final_f1_cumulative": self.final_f1_cumulative,
            "convergence_step": self.convergence_step,
            "f1_windowed": list(self.f1_windowed),
            "f1_cumulative": list(self.f1_cumulative),
            "prototype_counts": list(self.prototype_counts),
            "messages_sent": self.messages_sent,
            "messages_received": self.messages_received,
            "bytes_sent": self.bytes_sent,
            "prototypes_received": self.prototypes_received,
            "prototypes_dropped": self.prototypes_dropped,
            "tallies": dict(self.tallies),
        }


@dataclass(frozen=True)
class RunResult:
    """Outcome of one simulation: per-node series plus the message trace."""

    tagged_node: int
    nodes: tuple[NodeResult, ...]
    trace: tuple[MessageRecord, ...]
    rounds: int

    @property
    def total_messages(self) -> int:
        return len(self.trace)

    def to_dict(self) -> dict:
        return {
            "tagged_node": self.tagged_node,
            "rounds": self.rounds,
            "total_messages": self.total_messages,
            "nodes": [node.to_dict() for node in self.nodes],
            "trace": [list(record) for record in self.trace],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def run_simulation(cfg: SimConfig, dataset: Sequence[Sample]) -> RunResult:
    """Execute one seeded run and return the fully populated result."""
    cfg.validate(len(dataset))
    n_classes = max(2, max(sample.label for sample in dataset) + 1)
    dimension = dataset[0].dimension
    partition_rng, node_rngs = _spawn_rngs(cfg.seed, cfg.n_nodes)
    partitions = partition_stream(dataset, cfg.partition_sizes, partition_rng)
    nodes = [
        _NodeRuntime(i, partitions[i], cfg, n_classes) for i in range(cfg.n_nodes)
    ]
    peers = [
        [j for j in range(cfg.n_nodes) if j != i] for i in range(cfg.n_nodes)
    ]
    perf = {i: 0.0 for i in range(cfg.n_nodes)}
    trace: list[MessageRecord] = []
    bytes_per_prototype = (dimension + 1) * 8

    round_index = 0
    while True:
        round_index += 1
        for node in nodes:
            if not node.exhausted:
                sample = node.stream[node.cursor]
                node.cursor += 1
                predicted = node._predict(sample.features)
                node.window.append((predicted, sample.label))
                node.tracker.record(predicted, sample.label)
                windowed = update_perf(
                    perf, node.node_id, node.window, n_classes=n_classes
                )
                node.f1_windowed.append(windowed)
                node.f1_cumulative.append(node.tracker.cumulative_f1())
                node._learn(sample)
                node.prototype_counts.append(node.model.prototype_count)
                if cfg.protocol != "none":
                    payload = node.model.snapshot()
                    if cfg.protocol == "random":
                        messages = random_share_step(
                            node.node_id,
                            payload,
                            cfg.share,
                            peers[node.node_id],
                            node_rngs[node.node_id],
                        )
                    else:
                        messages = relative_threshold_step(
                            node.node_id,
                            payload,
                            cfg.share,
                            peers[node.node_id],
                            perf,
                            node_rngs[node.node_id],
                        )
                    for destination, proto_payload in messages:
                        nodes[destination].inbox.push(proto_payload)
                        nodes[destination].messages_received += 1
                        node.messages_sent += 1
                        node.bytes_sent += len(proto_payload) * bytes_per_prototype
                        trace.append(
                            MessageRecord(
                                round_index,
                                node.node_id,
                                destination,
                                len(proto_payload),
                            )
                        )
            node.prototypes_received += drain_inbox(node.model, node.inbox)
        if all(node.exhausted for node in nodes) and all(
            not node.inbox.has_snapshots() for node in nodes
        ):
            break

    results = []
    for node in nodes:
        series = node.f1_windowed
        results.append(
            NodeResult(
                node_id=node.node_id,
                samples_processed=node.cursor,
                final_f1=series[-1] if series else 0.0,
                final_f1_cumulative=(
                    node.f1_cumulative[-1] if node.f1_cumulative else 0.0
                ),
                convergence_step=convergence_time(series) if series else None,
                f1_windowed=tuple(series),
                f1_cumulative=tuple(node.f1_cumulative),
                prototype_counts=tuple(node.prototype_counts),
                messages_sent=node.messages_sent,
                messages_received=node.messages_received,
                bytes_sent=node.bytes_sent,
                prototypes_received=node.prototypes_received,
                prototypes_dropped=node.inbox.dropped,
                tallies=node.tracker.positive_tallies(),
            )
        )
    return RunResult(
        tagged_node=cfg.tagged_node,
        nodes=tuple(results),
        trace=tuple(trace),
        rounds=round_index,
    )


def run_centralized(
    dataset: Sequence[Sample], learner_params: XuIlvqParams | None = None
) -> RunResult:
    """Single node, whole stream, no protocol: the ideal reference scheme."""
    if len(dataset) == 0:
        return RunResult(
            tagged_node=0,
            nodes=(
                NodeResult(
                    node_id=0,
                    samples_processed=0,
                    final_f1=0.0,
                    final_f1_cumulative=0.0,
                    convergence_step=None,
                    f1_windowed=(),
                    f1_cumulative=(),
                    prototype_counts=(),
                    messages_sent=0,
                    messages_received=0,
                    bytes_sent=0,
                    prototypes_received=0,
                    prototypes_dropped=0,
                    tallies={"tp": 0, "fp": 0, "fn": 0, "tn": 0, "abstains": 0},
                ),
            ),
            trace=(),
            rounds=0,
        )
    cfg = SimConfig(
        n_nodes=1,
        partition_sizes=(len(dataset),),
        protocol="none",
        learner_params=learner_params or XuIlvqParams(),
    )
    return run_simulation(cfg, dataset)


@dataclass(frozen=True)
class NodeAggregate:
    """Replication statistics for one node."""

    node_id: int
    f1_mean: float
    f1_ci: float
    tc_mean: float | None
    tc_ci: float | None

    def to_dict(self) -> dict:
        return {
            "node_id": self.node_id,
            "f1_mean": self.f1_mean,
            "f1_ci": self.f1_ci,
            "tc_mean": self.tc_mean,
            "tc_ci": self.tc_ci,
        }


@dataclass(frozen=True)
class AggregateResult:
    """Means and 95% confidence half-widths over seeded replications."""

    n_replications: int
    tagged_node: int
    per_node: tuple[NodeAggregate, ...]
    l_mean: float

    @property
    def tagged(self) -> NodeAggregate:
        return self.per_node[self.tagged_node]

    def to_dict(self) -> dict:
        return {
            "n_replications": self.n_replications,
            "tagged_node": self.tagged_node,
            "per_node": [node.to_dict() for node in self.per_node],
            "l_mean": self.l_mean,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def _mean_ci(values: Sequence[float]) -> tuple[float, float]:
    """Mean and normal-approximation 95% half-width; zero width for n=1."""
    n = len(values)
    mean = float(np.mean(values))
    if n < 2:
        return mean, 0.0
    sd = float(np.std(values, ddof=1))
    return mean, _Z_95 * sd / math.sqrt(n)


def _run_for_seed(args: tuple[SimConfig, Sequence[Sample], int]) -> RunResult:
    cfg, dataset, seed = args
    return run_simulation(replace(cfg, seed=seed), dataset)


def _run_many(
    tasks: list[tuple[SimConfig, Sequence[Sample], int]], jobs: int
) -> list[RunResult]:
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_for_seed, tasks, chunksize=1))
    return [_run_for_seed(task) for task in tasks]


def _aggregate(cfg: SimConfig, results: Sequence[RunResult]) -> AggregateResult:
    per_node = []
    for node_id in range(cfg.n_nodes):
        finals = [run.nodes[node_id].final_f1 for run in results]
        f1_mean, f1_ci = _mean_ci(finals)
        tcs = [
            run.nodes[node_id].convergence_step
            for run in results
            if run.nodes[node_id].convergence_step is not None
        ]
        if tcs:
            tc_mean, tc_ci = _mean_ci([float(tc) for tc in tcs])
        else:
            tc_mean, tc_ci = None, None
        per_node.append(
            NodeAggregate(
                node_id=node_id,
                f1_mean=f1_mean,
                f1_ci=f1_ci,
                tc_mean=tc_mean,
                tc_ci=tc_ci,
            )
        )
    l_mean = float(np.mean([run.total_messages for run in results]))
    return AggregateResult(
        n_replications=len(results),
        tagged_node=cfg.tagged_node,
        per_node=tuple(per_node),
        l_mean=l_mean,
    )


def replicate(
    cfg: SimConfig, dataset: Sequence[Sample], jobs: int = 1
) -> AggregateResult:
    """Run ``cfg.replications`` seeded simulations (seed, seed+1, ...) and
    aggregate final F-scores, convergence steps, and message counts."""
    tasks = [
        (cfg, dataset, cfg.seed + offset) for offset in range(cfg.replications)
    ]
    results = _run_many(tasks, jobs)
    return _aggregate(cfg, results)


@dataclass(frozen=True)
class SweepRow:
    """One row of the sharing-probability sweep table (tagged-node stats)."""

    t: float
    f1_mean: float
    f1_ci: float
    l_mean: float
    tc_mean: float | None


def sweep_t(
    cfg: SimConfig,
    dataset: Sequence[Sample],
    t_values: Sequence[float],
    jobs: int = 1,
) -> list[SweepRow]:
    """Replicate the experiment at each sharing probability in ``t_values``."""
    if cfg.protocol == "none":
        raise ConfigError("sweep needs a sharing protocol, got 'none'")
    if cfg.share is None:
        raise ConfigError("sweep needs a share config for the fanout")
    configs = [
        replace(cfg, share=replace(cfg.share, share_prob=float(t)))
        for t in t_values
    ]
    tasks = [
        (sub_cfg, dataset, sub_cfg.seed + offset)
        for sub_cfg in configs
        for offset in range(cfg.replications)
    ]
    results = _run_many(tasks, jobs)
    rows = []
    for index, (t, sub_cfg) in enumerate(zip(t_values, configs)):
        chunk = results[index * cfg.replications : (index + 1) * cfg.replications]
        aggregate = _aggregate(sub_cfg, chunk)
        tagged = aggregate.tagged
        rows.append(
            SweepRow(
                t=float(t),
                f1_mean=tagged.f1_mean,
                f1_ci=tagged.f1_ci,
                l_mean=aggregate.l_mean,
                tc_mean=tagged.tc_mean,
            )
        )
    return rows


def write_sweep_csv(rows: Sequence[SweepRow], path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["t", "f1_mean", "f1_ci", "L_mean", "Tc_mean"])
        for row in rows:
            writer.writerow(
                [
                    row.t,
                    row.f1_mean,
                    row.f1_ci,
                    row.l_mean,
                    "" if row.tc_mean is None else row.tc_mean,
                ]
            )


def read_sweep_csv(path) -> list[SweepRow]:
    rows = []
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        for record in reader:
            rows.append(
                SweepRow(
                    t=float(record["t"]),
                    f1_mean=float(record["f1_mean"]),
                    f1_ci=float(record["f1_ci"]),
                    l_mean=float(record["L_mean"]),
                    tc_mean=(
                        None if record["Tc_mean"] == "" else float(record["Tc_mean"])
                    ),
                )
            )
    return rows
