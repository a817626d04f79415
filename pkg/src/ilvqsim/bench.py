"""Scaling study: learner memory and runtime against stream dimensions.

Each configuration trains one learner over a synthetic stream and
measures the prototype dictionary (count and bytes) plus the wall time
of the training loop.  Every configuration is repeated and the medians
are reported, which keeps the wall-time column usable on a noisy
machine.
"""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass
from typing import Sequence

from .datasets import SyntheticDatasetSpec, synth_dataset
from .metrics import storage_complexity
from .xuilvq import XuIlvqModel, XuIlvqParams

__all__ = ["BenchRow", "run_bench", "write_bench_csv", "read_bench_csv"]


@dataclass(frozen=True)
class BenchRow:
    n_features: int
    n_classes: int
    protos: int
    bytes: int
    wall_ms: float


def _measure(
    n_features: int,
    n_classes: int,
    n_samples: int,
    separation: float,
    seed: int,
    params: XuIlvqParams,
) -> tuple[int, int, float]:
    dataset = synth_dataset(
        SyntheticDatasetSpec(
            n_features=n_features,
            n_classes=n_classes,
            n_samples=n_samples,
            separation=separation,
            seed=seed,
        )
    )
    model = XuIlvqModel(params)
    started = time.perf_counter()
    for sample in dataset:
        model.learn_one(sample)
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    count, nbytes = storage_complexity(model)
    return count, nbytes, elapsed_ms


def bench_config(
    n_features: int,
    n_classes: int,
    n_samples: int = 2000,
    separation: float = 3.0,
    runs: int = 5,
    seed: int = 0,
    params: XuIlvqParams | None = None,
) -> BenchRow:
    """Median prototype count, bytes, and wall time over ``runs`` repeats."""
    params = params or XuIlvqParams()
    counts: list[int] = []
    sizes: list[int] = []
    times: list[float] = []
    for offset in range(runs):
        count, nbytes, elapsed = _measure(
            n_features, n_classes, n_samples, separation, seed + offset, params
        )
        counts.append(count)
        sizes.append(nbytes)
        times.append(elapsed)
    return BenchRow(
        n_features=n_features,
        n_classes=n_classes,
        protos=int(statistics.median(counts)),
        bytes=int(statistics.median(sizes)),
        wall_ms=float(statistics.median(times)),
    )


def run_bench(
    feature_grid: Sequence[int] = (5, 10, 20, 40),
    class_grid: Sequence[int] = (2, 4, 8),
    base_features: int = 10,
    base_classes: int = 2,
    n_samples: int = 2000,
    separation: float = 3.0,
    runs: int = 5,
    seed: int = 0,
    params: XuIlvqParams | None = None,
) -> tuple[list[BenchRow], list[BenchRow]]:
    """The two scaling axes: features at fixed classes, classes at fixed features."""
    feature_rows = [
        bench_config(f, base_classes, n_samples, separation, runs, seed, params)
        for f in feature_grid
    ]
    class_rows = [
        bench_config(base_features, c, n_samples, separation, runs, seed, params)
        for c in class_grid
    ]
    return feature_rows, class_rows


def write_bench_csv(rows: Sequence[BenchRow], path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["n_features", "n_classes", "protos", "bytes", "wall_ms"])
        for row in rows:
            writer.writerow(
                [row.n_features, row.n_classes, row.protos, row.bytes, row.wall_ms]
            )


def read_bench_csv(path) -> list[BenchRow]:
    rows = []
    with open(path, newline="") as handle:
        for record in csv.DictReader(handle):
            rows.append(
                BenchRow(
                    n_features=int(record["n_features"]),
                    n_classes=int(record["n_classes"]),
                    protos=int(record["protos"]),
                    bytes=int(record["bytes"]),
                    wall_ms=float(record["wall_ms"]),
                )
            )
    return rows
