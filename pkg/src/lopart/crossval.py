"""Cross-validation over labels: fold assignment and the two analyses.

Labels within each sequence are dealt to K folds; split ``s`` holds out
fold ``s`` as the test set and trains on the rest.  Two analyses mirror
the evaluation protocol:

* best-penalty: per sequence/split/algorithm, pick the grid penalty
  minimizing train+test errors (ties toward the larger penalty), with
  the infinite-penalty model as the no-grid baseline.
* predicted-penalty: learn a penalty from the train folds with each
  method (bic0, constant1, linear2), solve at the predicted penalty,
  and trace per-method ROC curves by scaling the predictions over the
  multiplier grid.

All outputs are fully determined by (corpus, k, mode, seed); report
rows are sorted so parallel or repeated runs serialize identically.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .core import DataSequence, LabelSet, lopart, lopart_infinite, opart
from .metrics import ErrorCounts, RocPoint, roc_curve, total_errors
from .penalty import (
    PENALTY_GRID,
    PenaltyModel,
    best_constant,
    compute_error_curve,
    fit_linear2,
    predict_penalty,
    scale_interval,
    target_interval,
)

__all__ = [
    "FoldAssignment",
    "CorpusSequence",
    "ReportRow",
    "RocResult",
    "assign_folds",
    "corpus_fold_assignments",
    "split_labels",
    "best_penalty_analysis",
    "predicted_penalty_analysis",
]

PREDICTED_ALGORITHMS = ("lopart", "opart")
PREDICTED_METHODS = ("bic0", "constant1", "linear2")


class CorpusSequence(NamedTuple):
    sequence_id: str
    data: DataSequence
    labels: LabelSet


@dataclass(frozen=True)
class FoldAssignment:
    """Per-label fold ids in {1..k}, a pure function of its inputs."""

    sequence_id: str
    folds: tuple[int, ...]
    k: int
    mode: str
    seed: int


@dataclass(frozen=True)
class ReportRow:
    sequence_id: str
    split: int
    algorithm: str
    method: str
    penalty: float
    train: ErrorCounts
    test: ErrorCounts


class RocResult(NamedTuple):
    points: tuple[RocPoint, ...]
    auc: float | None


def assign_folds(
    labels: LabelSet,
    k: int,
    mode: str = "random",
    seed: int = 0,
    sequence_id: str = "",
) -> FoldAssignment:
    """Assign each label to a fold.

    ``random`` shuffles label indices with the seeded generator and
    deals them round-robin; ``sequential`` splits the ordered labels
    into k contiguous chunks (first chunk is fold 1).  Either way every
    fold is nonempty, which is why ``len(labels) >= k`` is required.
    """
    m = len(labels)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if m < k:
        raise ValueError(f"need at least k={k} labels per sequence, got {m}")
    if mode == "random":
        rng = np.random.default_rng(_fold_seed(seed, sequence_id))
        order = rng.permutation(m)
        folds = [0] * m
        for position, label_index in enumerate(order):
            folds[label_index] = position % k + 1
    elif mode == "sequential":
        folds = []
        for fold_id, chunk in enumerate(np.array_split(np.arange(m), k), start=1):
            folds.extend([fold_id] * len(chunk))
    else:
        raise ValueError(f"mode must be 'random' or 'sequential', got {mode!r}")
    return FoldAssignment(sequence_id, tuple(folds), k, mode, seed)


def _fold_seed(seed: int, sequence_id: str) -> list[int]:
    # crc32 keeps the derived stream stable across runs and platforms.
    return [seed, zlib.crc32(sequence_id.encode("utf-8"))]


def corpus_fold_assignments(
    corpus: Sequence[CorpusSequence], k: int, mode: str = "random", seed: int = 0
) -> dict[str, FoldAssignment]:
    return {
        item.sequence_id: assign_folds(item.labels, k, mode, seed, item.sequence_id)
        for item in corpus
    }


def split_labels(
    labels: LabelSet, assignment: FoldAssignment, test_fold: int
) -> tuple[LabelSet, LabelSet]:
    """(train, test) label sets for the split holding out ``test_fold``."""
    if len(assignment.folds) != len(labels):
        raise ValueError("fold assignment does not match the label set")
    test_idx = [i for i, f in enumerate(assignment.folds) if f == test_fold]
    train_idx = [i for i, f in enumerate(assignment.folds) if f != test_fold]
    return labels.restrict(train_idx), labels.restrict(test_idx)


def _select_grid_penalty(evaluations: list[tuple[float, ErrorCounts, ErrorCounts]]):
    """Penalty minimizing train+test errors; ties toward larger penalty."""
    best = None
    for lam, train, test in evaluations:
        combined = train.total + test.total
        if best is None or combined <= best[0]:
            best = (combined, lam, train, test)
    assert best is not None
    return best[1], best[2], best[3]


def best_penalty_analysis(
    seq: DataSequence,
    labels: LabelSet,
    assignment: FoldAssignment,
    algorithms: Sequence[str] = ("lopart", "opart", "segannot"),
    sequence_id: str = "",
) -> list[ReportRow]:
    """Best-case comparison on one sequence: oracle-selected penalties."""
    rows: list[ReportRow] = []
    sid = sequence_id or assignment.sequence_id
    for split in range(1, assignment.k + 1):
        train_labels, test_labels = split_labels(labels, assignment, split)
        for algorithm in algorithms:
            if algorithm == "segannot":
                seg = lopart_infinite(seq, train_labels)
                rows.append(
                    ReportRow(
                        sid,
                        split,
                        algorithm,
                        "best",
                        math.inf,
                        total_errors(train_labels, seg.changepoints),
                        total_errors(test_labels, seg.changepoints),
                    )
                )
                continue
            evaluations = []
            for lam in PENALTY_GRID:
                if algorithm == "opart":
                    seg = opart(seq, lam)
                elif algorithm == "lopart":
                    seg = lopart(seq, train_labels, lam)
                else:
                    raise ValueError(f"unknown algorithm {algorithm!r}")
                evaluations.append(
                    (
                        lam,
                        total_errors(train_labels, seg.changepoints),
                        total_errors(test_labels, seg.changepoints),
                    )
                )
            lam, train, test = _select_grid_penalty(evaluations)
            rows.append(ReportRow(sid, split, algorithm, "best", lam, train, test))
    rows.sort(key=lambda r: (r.sequence_id, r.split, r.algorithm, r.method))
    return rows


def _fit_models(
    corpus: Sequence[CorpusSequence],
    splits: Mapping[str, tuple[LabelSet, LabelSet]],
) -> dict[str, PenaltyModel]:
    curves = [
        compute_error_curve(item.data, splits[item.sequence_id][0], item.sequence_id)
        for item in corpus
    ]
    features = [math.log(math.log(c.n)) for c in curves]
    # Intervals come out of the grid in log10 units; the linear model
    # predicts natural-log penalties, so rescale before fitting.
    intervals = [scale_interval(target_interval(c), math.log(10.0)) for c in curves]
    return {
        "bic0": PenaltyModel("bic0", 1.0, 0.0),
        "constant1": best_constant(curves),
        "linear2": fit_linear2(features, intervals),
    }


def predicted_penalty_analysis(
    corpus: Sequence[CorpusSequence],
    assignments: Mapping[str, FoldAssignment],
    methods: Sequence[str] = PREDICTED_METHODS,
) -> tuple[list[ReportRow], dict[tuple[int, str, str], RocResult]]:
    """Learned-penalty comparison across a corpus.

    Returns one report row per (sequence, split, algorithm, method) and
    a ROC curve per (split, method, algorithm): each curve scales the
    per-sequence predicted penalties by the 21 grid multipliers and
    aggregates test errors over the corpus at each multiplier.
    """
    if not corpus:
        raise ValueError("empty corpus")
    corpus = sorted(corpus, key=lambda item: item.sequence_id)
    ks = {assignments[item.sequence_id].k for item in corpus}
    if len(ks) != 1:
        raise ValueError("all fold assignments must share the same k")
    k = ks.pop()
    rows: list[ReportRow] = []
    roc: dict[tuple[int, str, str], RocResult] = {}
    for split in range(1, k + 1):
        splits = {
            item.sequence_id: split_labels(
                item.labels, assignments[item.sequence_id], split
            )
            for item in corpus
        }
        models = _fit_models(corpus, splits)
        for method in methods:
            model = models[method]
            predicted = {
                item.sequence_id: predict_penalty(model, item.data.n)
                for item in corpus
            }
            for algorithm in PREDICTED_ALGORITHMS:
                curve_counts = []
                for factor in PENALTY_GRID:
                    aggregate = ErrorCounts()
                    for item in corpus:
                        train_labels, test_labels = splits[item.sequence_id]
                        seg = _solve(
                            algorithm,
                            item.data,
                            train_labels,
                            predicted[item.sequence_id] * factor,
                        )
                        aggregate = aggregate + total_errors(
                            test_labels, seg.changepoints
                        )
                    curve_counts.append((factor, aggregate))
                points, auc = roc_curve(curve_counts)
                roc[(split, method, algorithm)] = RocResult(tuple(points), auc)
                for item in corpus:
                    train_labels, test_labels = splits[item.sequence_id]
                    lam = predicted[item.sequence_id]
                    seg = _solve(algorithm, item.data, train_labels, lam)
                    rows.append(
                        ReportRow(
                            item.sequence_id,
                            split,
                            algorithm,
                            method,
                            lam,
                            total_errors(train_labels, seg.changepoints),
                            total_errors(test_labels, seg.changepoints),
                        )
                    )
    rows.sort(key=lambda r: (r.sequence_id, r.split, r.algorithm, r.method))
    return rows, roc


def _solve(algorithm: str, seq: DataSequence, train_labels: LabelSet, lam: float):
    if algorithm == "opart":
        return opart(seq, lam)
    if algorithm == "lopart":
        return lopart(seq, train_labels, lam)
    raise ValueError(f"unknown algorithm {algorithm!r}")
