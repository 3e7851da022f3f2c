"""Penalty selection: BIC, grid-searched constant, and interval regression.

Three prediction methods share one model record:

* ``bic0`` — the unsupervised ``log N`` rule, no learned parameters.
* ``constant1`` — one grid-searched penalty minimizing train label
  errors, reused for every sequence.
* ``linear2`` — ``log lambda = w * log log N + b`` fit by squared-hinge
  interval regression; with ``(w, b) == (1, 0)`` it reproduces BIC
  exactly, which anchors the parameterization.

Error curves are computed with the unconstrained solver over a fixed
grid of 21 penalties evenly spaced on the log scale between 1e-5 and
1e5.  Target intervals extracted from a curve are expressed in log10
units (the grid's natural coordinates); callers fitting ``linear2``
against natural-log predictions should rescale (see
:func:`scale_interval`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DataSequence, LabelSet, opart
from .metrics import ErrorCounts, total_errors

__all__ = [
    "PENALTY_EXPONENTS",
    "PENALTY_GRID",
    "ErrorCurve",
    "TargetInterval",
    "PenaltyModel",
    "bic_penalty",
    "compute_error_curve",
    "best_constant",
    "target_interval",
    "scale_interval",
    "squared_hinge_loss",
    "squared_hinge_gradient",
    "fit_linear2",
    "predict_penalty",
]

PENALTY_EXPONENTS: tuple[float, ...] = tuple(-5.0 + 0.5 * k for k in range(21))
PENALTY_GRID: tuple[float, ...] = tuple(10.0**e for e in PENALTY_EXPONENTS)

METHODS = ("bic0", "constant1", "linear2")


@dataclass(frozen=True)
class ErrorCurve:
    """Train label errors of the unconstrained solver per grid penalty."""

    sequence_id: str
    n: int
    grid: tuple[float, ...]
    errors: tuple[ErrorCounts, ...]


@dataclass(frozen=True)
class TargetInterval:
    """Log-penalty interval with minimal train errors; ends may be inf."""

    lo: float
    hi: float


@dataclass(frozen=True)
class PenaltyModel:
    """A fitted penalty predictor.

    ``constant1`` keeps its penalty in ``b`` (``w`` unused); ``bic0``
    is parameter-free and stored as ``(1, 0)`` for the linear-model
    correspondence.  ``degenerate`` flags a fit that fell back to the
    initialization (no finite targets, or an unstable descent).
    ``loss_history`` records the objective at each iterate when fit.
    """

    method: str
    w: float
    b: float
    degenerate: bool = False
    loss_history: tuple[float, ...] = ()


def bic_penalty(n: int) -> float:
    """The Bayesian information criterion penalty, ``log n``."""
    if n < 2:
        raise ValueError(f"BIC penalty needs n >= 2, got {n}")
    return math.log(n)


def compute_error_curve(
    seq: DataSequence, train_labels: LabelSet, sequence_id: str = ""
) -> ErrorCurve:
    """Run the unconstrained solver over the grid and score train labels."""
    errors = tuple(
        total_errors(train_labels, opart(seq, lam).changepoints)
        for lam in PENALTY_GRID
    )
    return ErrorCurve(sequence_id, seq.n, PENALTY_GRID, errors)


def _grid_totals(curves: list[ErrorCurve] | tuple[ErrorCurve, ...]) -> list[int]:
    totals = [0] * len(PENALTY_GRID)
    for curve in curves:
        if len(curve.errors) != len(PENALTY_GRID):
            raise ValueError("error curve does not match the penalty grid")
        for k, counts in enumerate(curve.errors):
            totals[k] += counts.total
    return totals


def best_constant(curves: list[ErrorCurve]) -> PenaltyModel:
    """Grid penalty minimizing total train errors; ties go to larger."""
    if not curves:
        raise ValueError("need at least one error curve")
    totals = _grid_totals(curves)
    best_k = 0
    for k in range(len(totals)):
        if totals[k] <= totals[best_k]:
            best_k = k
    return PenaltyModel("constant1", 0.0, PENALTY_GRID[best_k])


def target_interval(curve: ErrorCurve) -> TargetInterval:
    """Largest contiguous minimal-error run of one curve, in log10 units.

    Endpoints touching the grid boundary widen to -inf/+inf.  Between
    equal-length runs the first (smaller penalty) wins.
    """
    totals = [counts.total for counts in curve.errors]
    if len(totals) != len(PENALTY_EXPONENTS):
        raise ValueError("error curve does not match the penalty grid")
    minimum = min(totals)
    best_run: tuple[int, int] | None = None
    start = None
    for k, value in enumerate([*totals, None]):
        if value == minimum:
            if start is None:
                start = k
        elif start is not None:
            if best_run is None or (k - 1 - start) > (best_run[1] - best_run[0]):
                best_run = (start, k - 1)
            start = None
    assert best_run is not None
    i0, i1 = best_run
    lo = -math.inf if i0 == 0 else PENALTY_EXPONENTS[i0]
    hi = math.inf if i1 == len(PENALTY_EXPONENTS) - 1 else PENALTY_EXPONENTS[i1]
    return TargetInterval(lo, hi)


def scale_interval(interval: TargetInterval, factor: float) -> TargetInterval:
    """Rescale finite endpoints, e.g. by ``log(10)`` to reach natural log."""
    lo = interval.lo * factor if math.isfinite(interval.lo) else interval.lo
    hi = interval.hi * factor if math.isfinite(interval.hi) else interval.hi
    return TargetInterval(lo, hi)


def _hinge_terms(w, b, x, lo, hi, margin):
    p = w * x + b
    below = np.maximum(0.0, (lo + margin) - p)
    above = np.maximum(0.0, p - (hi - margin))
    return below, above


def squared_hinge_loss(
    w: float,
    b: float,
    features: np.ndarray,
    lows: np.ndarray,
    highs: np.ndarray,
    margin: float = 1.0,
) -> float:
    """Sum of squared hinge violations of ``w*x + b`` vs the intervals."""
    below, above = _hinge_terms(w, b, features, lows, highs, margin)
    return float(np.sum(below * below + above * above))


def squared_hinge_gradient(
    w: float,
    b: float,
    features: np.ndarray,
    lows: np.ndarray,
    highs: np.ndarray,
    margin: float = 1.0,
) -> tuple[float, float]:
    """Gradient of :func:`squared_hinge_loss` in ``(w, b)``."""
    below, above = _hinge_terms(w, b, features, lows, highs, margin)
    pull = 2.0 * (above - below)
    return float(np.sum(pull * features)), float(np.sum(pull))


def fit_linear2(
    features: list[float],
    intervals: list[TargetInterval],
    margin: float = 1.0,
    step: float = 0.01,
    max_iter: int = 5000,
    grad_tol: float = 1e-6,
) -> PenaltyModel:
    """Fit ``log lambda = w*x + b`` into the target intervals.

    Full-gradient descent with a fixed step from ``(w, b) = (1, 0)``,
    stopping when the gradient norm drops below ``grad_tol``.  If every
    interval is doubly infinite, or the descent fails to improve on the
    start (a fixed step can overshoot on badly scaled inputs), the
    initialization is returned with ``degenerate`` set.
    """
    if len(features) != len(intervals) or not features:
        raise ValueError("need equally many features and intervals, at least one")
    x = np.asarray(features, dtype=float)
    lo = np.array([iv.lo for iv in intervals], dtype=float)
    hi = np.array([iv.hi for iv in intervals], dtype=float)
    if np.any(lo > hi):
        raise ValueError("target interval with lo > hi")
    w, b = 1.0, 0.0
    initial = squared_hinge_loss(w, b, x, lo, hi, margin)
    if not (np.isfinite(lo).any() or np.isfinite(hi).any()):
        return PenaltyModel("linear2", w, b, degenerate=True, loss_history=(initial,))
    history = [initial]
    for _ in range(max_iter):
        gw, gb = squared_hinge_gradient(w, b, x, lo, hi, margin)
        if math.hypot(gw, gb) < grad_tol:
            break
        w -= step * gw
        b -= step * gb
        history.append(squared_hinge_loss(w, b, x, lo, hi, margin))
    final = history[-1]
    if not (math.isfinite(w) and math.isfinite(b)) or final > initial:
        return PenaltyModel(
            "linear2", 1.0, 0.0, degenerate=True, loss_history=tuple(history)
        )
    return PenaltyModel("linear2", w, b, loss_history=tuple(history))


def predict_penalty(model: PenaltyModel, n: int) -> float:
    """Predicted penalty for a sequence of ``n`` data points.

    ``linear2`` evaluates ``exp(w * log log n + b)`` in the equivalent
    form ``exp(b) * log(n)**w`` so that ``(w, b) == (1, 0)`` returns
    exactly ``log n``.
    """
    if n < 2:
        raise ValueError(f"penalty prediction needs n >= 2, got {n}")
    if model.method == "bic0":
        return math.log(n)
    if model.method == "constant1":
        return model.b
    if model.method == "linear2":
        return math.exp(model.b) * math.log(n) ** model.w
    raise ValueError(f"unknown penalty method {model.method!r}")
