"""Per-label evaluation of predicted changepoints, plus ROC/AUC.

A label is a false positive when it contains more predicted changes
than expected (either polarity), a false negative when a positive label
contains none, and a true positive when a positive label contains at
least one.  A positive label holding two changes is simultaneously a
false positive and a true positive; its single ``status`` is
``false_positive`` while ``is_true_positive`` stays set.

ROC conventions: TPR = tp / positive labels and FPR = fp / total labels
(the denominator counts both polarities because both can be false
positives).  AUC uses the trapezoid rule after anchoring the curve at
(0, 0) and (1, 1), since finite penalty grids rarely reach the
extremes.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from typing import Sequence

from .core import Label, LabelSet, count_changes

__all__ = [
    "CORRECT",
    "FALSE_POSITIVE",
    "FALSE_NEGATIVE",
    "LabelOutcome",
    "ErrorCounts",
    "RocPoint",
    "classify_label",
    "total_errors",
    "roc_curve",
]

CORRECT = "correct"
FALSE_POSITIVE = "false_positive"
FALSE_NEGATIVE = "false_negative"


@dataclass(frozen=True)
class LabelOutcome:
    label_index: int
    predicted_changes: int
    status: str
    is_true_positive: bool


@dataclass(frozen=True)
class ErrorCounts:
    """Aggregated label outcomes; adds component-wise."""

    fp: int = 0
    fn: int = 0
    tp: int = 0
    total_labels: int = 0
    positive_labels: int = 0

    @property
    def total(self) -> int:
        return self.fp + self.fn

    def __add__(self, other: "ErrorCounts") -> "ErrorCounts":
        if not isinstance(other, ErrorCounts):
            return NotImplemented
        return ErrorCounts(
            self.fp + other.fp,
            self.fn + other.fn,
            self.tp + other.tp,
            self.total_labels + other.total_labels,
            self.positive_labels + other.positive_labels,
        )


@dataclass(frozen=True)
class RocPoint:
    """One ROC coordinate; ``tpr``/``fpr`` are None when undefined."""

    penalty: float
    tpr: float | None
    fpr: float | None


def classify_label(
    label: Label,
    changepoints: Sequence[int],
    index: int = 0,
    assume_sorted: bool = False,
) -> LabelOutcome:
    """Classify one label against a set of predicted changepoints."""
    if assume_sorted:
        predicted = bisect_left(changepoints, label.end) - bisect_left(
            changepoints, label.start
        )
    else:
        predicted = count_changes(changepoints, label.start, label.end)
    if predicted == label.changes:
        status = CORRECT
    elif predicted > label.changes:
        status = FALSE_POSITIVE
    else:
        status = FALSE_NEGATIVE
    is_tp = label.changes == 1 and predicted >= 1
    return LabelOutcome(index, predicted, status, is_tp)


def total_errors(labels: LabelSet, changepoints: Sequence[int]) -> ErrorCounts:
    """Aggregate per-label outcomes into error counts."""
    ordered = sorted(changepoints)
    fp = fn = tp = 0
    for i, lab in enumerate(labels.labels):
        outcome = classify_label(lab, ordered, i, assume_sorted=True)
        fp += outcome.status == FALSE_POSITIVE
        fn += outcome.status == FALSE_NEGATIVE
        tp += outcome.is_true_positive
    positives = sum(lab.changes == 1 for lab in labels.labels)
    return ErrorCounts(fp, fn, tp, len(labels.labels), positives)


def roc_curve(
    per_penalty_counts: Sequence[tuple[float, ErrorCounts]],
) -> tuple[list[RocPoint], float | None]:
    """ROC points over a penalty grid plus the trapezoid AUC.

    With zero positive labels the TPR is undefined: points carry
    ``tpr=None`` (sorted by penalty) and the AUC is None.
    """
    if not per_penalty_counts:
        raise ValueError("need at least one (penalty, counts) point")
    points: list[RocPoint] = []
    defined = True
    for penalty, counts in per_penalty_counts:
        tpr = counts.tp / counts.positive_labels if counts.positive_labels else None
        fpr = counts.fp / counts.total_labels if counts.total_labels else None
        defined = defined and tpr is not None and fpr is not None
        points.append(RocPoint(float(penalty), tpr, fpr))
    if not defined:
        points.sort(key=lambda p: p.penalty)
        return points, None
    points.sort(key=lambda p: (p.fpr, p.tpr))
    xs = [0.0, *(p.fpr for p in points), 1.0]
    ys = [0.0, *(p.tpr for p in points), 1.0]
    auc = sum(
        (xs[i + 1] - xs[i]) * (ys[i + 1] + ys[i]) / 2.0
        for i in range(len(xs) - 1)
    )
    return points, auc
