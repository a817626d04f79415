"""Performance metrics: F-score, convergence time, message and storage counts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

# Fraction of the best F-score that counts as "converged".
CONVERGENCE_FRACTION = 0.85

__all__ = [
    "CONVERGENCE_FRACTION",
    "ConfusionCounts",
    "f1",
    "binary_counts",
    "prequential_f1",
    "convergence_time",
    "comm_complexity",
    "storage_complexity",
]


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int = 0


def f1(counts: ConfusionCounts) -> float:
    """F-score 2*tp / (2*tp + fp + fn); 0 when the denominator is 0."""
    denominator = 2 * counts.tp + counts.fp + counts.fn
    if denominator == 0:
        return 0.0
    return 2 * counts.tp / denominator


def binary_counts(
    pairs: Sequence[tuple[int | None, int]], positive_label: int = 1
) -> ConfusionCounts:
    """Confusion counts for (predicted, actual) pairs against one positive class.

    An abstention (predicted is None) is scored as wrong: it becomes a false
    negative when the actual class is positive and a true negative otherwise
    (it can never be a true positive).
    """
    tp = fp = fn = tn = 0
    for predicted, actual in pairs:
        if actual == positive_label:
            if predicted == positive_label:
                tp += 1
            else:
                fn += 1
        elif predicted == positive_label:
            fp += 1
        else:
            tn += 1
    return ConfusionCounts(tp, fp, fn, tn)


def prequential_f1(
    pairs: Sequence[tuple[int | None, int]],
    n_classes: int = 2,
    positive_label: int = 1,
) -> float:
    """F-score of a window of prequential (predicted, actual) pairs.

    Binary problems are scored against ``positive_label``; problems with
    more classes are macro-averaged over the label universe
    ``0..n_classes-1``.  Abstentions count as wrong.
    """
    if not pairs:
        return 0.0
    if n_classes == 2:
        return f1(binary_counts(pairs, positive_label))
    total = 0.0
    for label in range(n_classes):
        total += f1(binary_counts(pairs, positive_label=label))
    return total / n_classes


def convergence_time(series: Sequence[float]) -> int | None:
    """First index where the series reaches 85% of its own maximum.

    Returns None when the series never rises above zero.
    """
    if not series:
        raise ValueError("convergence_time needs a non-empty series")
    peak = max(series)
    if peak <= 0.0:
        return None
    threshold = CONVERGENCE_FRACTION * peak
    for index, value in enumerate(series):
        if value >= threshold:
            return index
    return None  # unreachable: the peak itself satisfies the threshold


def comm_complexity(trace: Sequence) -> int:
    """Total point-to-point messages: the length of the message trace."""
    return len(trace)


def storage_complexity(model) -> tuple[int, int]:
    """(count, bytes) of a model's prototype dictionary.

    ``model`` needs ``prototype_count`` and ``dimension`` attributes.  Bytes
    charge each prototype one float per feature plus one for the label, at
    8 bytes each.
    """
    count = model.prototype_count
    if count == 0:
        return 0, 0
    return count, count * (model.dimension + 1) * 8
