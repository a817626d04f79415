"""Dataset ingestion and synthetic stream generation.

CSV ingestion expects a header row, decimal feature columns, and one
label column; labels are mapped to dense integers (numeric labels sort
numerically, anything else lexicographically, so e.g. False/0 maps to 0
and True/1 maps to 1).  The synthetic generator produces seeded
isotropic Gaussian blobs, one centroid per class, rescaled so the
closest pair of centroids sits exactly at the requested separation.

A synthetic stand-in for the 1250-sample / 10-feature / 2-class web
phishing stream ships with the package so every experiment runs offline;
see the README for how to substitute the real dataset.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .prototypes import Sample

__all__ = [
    "DatasetError",
    "CsvDatasetSpec",
    "SyntheticDatasetSpec",
    "load_csv",
    "synth_dataset",
    "load_dataset",
    "stand_in_path",
    "load_stand_in",
]

STAND_IN_FILENAME = "phishing_stand_in.csv"


class DatasetError(ValueError):
    """A dataset that cannot be loaded or generated as specified."""


@dataclass(frozen=True)
class CsvDatasetSpec:
    """Where to find a CSV stream and how to read it.

    ``feature_columns`` defaults to every non-label column in header
    order; naming them explicitly makes ingestion independent of column
    order in the file.
    """

    path: str
    label_column: str = "label"
    feature_columns: tuple[str, ...] | None = None


@dataclass(frozen=True)
class SyntheticDatasetSpec:
    """Parameters of a Gaussian-blob stream."""

    n_features: int = 10
    n_classes: int = 2
    n_samples: int = 1250
    separation: float = 3.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_features < 1:
            raise DatasetError(f"n_features must be >= 1, got {self.n_features}")
        if self.n_classes < 2:
            raise DatasetError(f"n_classes must be >= 2, got {self.n_classes}")
        if self.n_samples < 1:
            raise DatasetError(f"n_samples must be >= 1, got {self.n_samples}")
        if self.separation <= 0:
            raise DatasetError(f"separation must be positive, got {self.separation}")


def _label_mapping(raw_labels: list[str]) -> dict[str, int]:
    unique = sorted(set(raw_labels))
    try:
        unique.sort(key=int)
    except ValueError:
        pass  # non-numeric labels keep lexicographic order
    return {label: index for index, label in enumerate(unique)}


def load_csv(spec: CsvDatasetSpec) -> tuple[list[Sample], dict[str, int]]:
    """Read an ordered sample stream from a CSV file.

    Returns the samples in file order plus the label-to-integer mapping
    that was applied.

    Raises:
        FileNotFoundError: if the file does not exist.
        DatasetError: on a missing column or an unparsable cell; the
            message carries the file line number.
    """
    path = Path(spec.path)
    if not path.exists():
        raise FileNotFoundError(f"dataset file not found: {path}")
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        if spec.label_column not in header:
            raise DatasetError(
                f"label column {spec.label_column!r} not in header {header}"
            )
        if spec.feature_columns is None:
            feature_columns = [c for c in header if c != spec.label_column]
        else:
            feature_columns = list(spec.feature_columns)
            missing = [c for c in feature_columns if c not in header]
            if missing:
                raise DatasetError(f"feature columns missing from header: {missing}")
        if not feature_columns:
            raise DatasetError("no feature columns")
        raw_rows: list[tuple[np.ndarray, str]] = []
        for line_number, row in enumerate(reader, start=2):
            try:
                features = np.array(
                    [float(row[c]) for c in feature_columns], dtype=float
                )
            except (TypeError, ValueError) as exc:
                raise DatasetError(f"line {line_number}: bad feature value ({exc})")
            label = row[spec.label_column]
            if label is None:
                raise DatasetError(f"line {line_number}: missing label")
            raw_rows.append((features, label))
    mapping = _label_mapping([label for _, label in raw_rows])
    samples = [Sample(features, mapping[label]) for features, label in raw_rows]
    return samples, mapping


def _draw_centroids(spec: SyntheticDatasetSpec, rng: np.random.Generator) -> np.ndarray:
    centroids = rng.normal(size=(spec.n_classes, spec.n_features))
    min_gap = min(
        float(np.linalg.norm(centroids[i] - centroids[j]))
        for i in range(spec.n_classes)
        for j in range(i + 1, spec.n_classes)
    )
    return centroids * (spec.separation / min_gap)


def synth_dataset(spec: SyntheticDatasetSpec) -> list[Sample]:
    """Seeded isotropic Gaussian blobs as an ordered stream.

    Class centroids are drawn once, then rescaled so the minimum pairwise
    centroid distance equals ``spec.separation``; samples get unit-variance
    noise and uniformly random class labels, in stream order.
    """
    rng = np.random.default_rng(spec.seed)
    centroids = _draw_centroids(spec, rng)
    labels = rng.integers(0, spec.n_classes, size=spec.n_samples)
    noise = rng.normal(size=(spec.n_samples, spec.n_features))
    features = centroids[labels] + noise
    return [
        Sample(features[i], int(labels[i])) for i in range(spec.n_samples)
    ]


def blob_centroids(spec: SyntheticDatasetSpec) -> np.ndarray:
    """The exact centroids ``synth_dataset`` uses (for oracle checks)."""
    return _draw_centroids(spec, np.random.default_rng(spec.seed))


def load_dataset(
    spec: CsvDatasetSpec | SyntheticDatasetSpec,
) -> list[Sample]:
    """Materialize either kind of dataset spec as an ordered sample list."""
    if isinstance(spec, CsvDatasetSpec):
        samples, _ = load_csv(spec)
        return samples
    return synth_dataset(spec)


def stand_in_path() -> Path:
    """Filesystem path of the bundled synthetic stand-in CSV."""
    return Path(resources.files("ilvqsim").joinpath("data", STAND_IN_FILENAME))


def load_stand_in() -> list[Sample]:
    """The bundled 1250-sample stand-in stream, loaded through the CSV path."""
    samples, _ = load_csv(CsvDatasetSpec(path=str(stand_in_path())))
    return samples
