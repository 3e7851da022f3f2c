"""Exact changepoint solvers for partially labeled sequences.

Positions are 1-based everywhere in this module: a changepoint at
position ``t`` means the segment mean differs between data points ``t``
and ``t + 1``, so valid changepoints live in ``{1, ..., N - 1}``.  A
label ``(start, end, changes)`` constrains the number of changepoints
at indices ``{start, ..., end - 1}`` to equal ``changes`` (0 or 1).

Two solvers share one dynamic program:

* :func:`opart` ignores labels and returns the globally optimal
  penalized segmentation.
* :func:`lopart` returns the optimal segmentation among those
  consistent with every label, by restricting the set of admissible
  last-changepoint candidates as the recursion advances.

Both use the square loss with O(1) per-segment cost from prefix sums,
and both break cost ties toward the smallest last changepoint so output
is deterministic.  :func:`brute_force_solve` enumerates all changepoint
subsets (small N only) with the same tie rule and serves as the test
oracle.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from numba import njit

__all__ = [
    "LabelValidationError",
    "DataSequence",
    "Label",
    "LabelSet",
    "Segmentation",
    "DpState",
    "validate_labels",
    "segment_loss",
    "segment_mean",
    "last_label_index",
    "candidate_set_update",
    "count_changes",
    "opart",
    "lopart",
    "lopart_infinite",
    "dp_solve",
    "brute_force_solve",
    "objective_value",
]

BRUTE_FORCE_MAX_N = 16


class LabelValidationError(ValueError):
    """Raised when a label list violates the region model.

    ``index`` identifies the offending label: the position in the raw
    input list for per-label field errors, the position in start-sorted
    order for overlap errors.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True, eq=False)
class DataSequence:
    """A univariate sequence with prefix sums for O(1) segment losses.

    ``cum_sum[t]`` and ``cum_sq[t]`` hold the sums of the first ``t``
    values and squared values (``cum_sum[0] == cum_sq[0] == 0``), in
    double precision with no compensated summation; acceptable at the
    relative tolerances used here for N up to ~1e5.
    """

    values: np.ndarray
    cum_sum: np.ndarray = field(init=False, repr=False)
    cum_sq: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.size < 1:
            raise ValueError("data sequence must be a non-empty 1-d vector")
        if not np.all(np.isfinite(vals)):
            raise ValueError("data sequence must contain only finite values")
        object.__setattr__(self, "values", vals)
        object.__setattr__(
            self, "cum_sum", np.concatenate(([0.0], np.cumsum(vals)))
        )
        object.__setattr__(
            self, "cum_sq", np.concatenate(([0.0], np.cumsum(vals * vals)))
        )

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __eq__(self, other):
        if not isinstance(other, DataSequence):
            return NotImplemented
        return np.array_equal(self.values, other.values)


@dataclass(frozen=True)
class Label:
    """A region ``[start, end]`` expected to contain ``changes`` changepoints.

    The governed changepoint indices are ``{start, ..., end - 1}``; a
    change exactly at ``end`` belongs to the next label when regions
    share that boundary point.
    """

    start: int
    end: int
    changes: int


@dataclass(frozen=True)
class LabelSet:
    """Ordered, validated labels for a sequence of length ``n``.

    ``negative_region`` is the union of changepoint indices governed by
    zero-change labels; those indices are never admissible last-change
    candidates.  Construct via :func:`validate_labels`.
    """

    labels: tuple[Label, ...]
    negative_region: frozenset[int]
    n: int

    def __len__(self) -> int:
        return len(self.labels)

    def restrict(self, indices: Iterable[int]) -> "LabelSet":
        """Sub-LabelSet keeping only the labels at ``indices``."""
        keep = sorted(set(indices))
        raw = [(self.labels[i].start, self.labels[i].end, self.labels[i].changes) for i in keep]
        return validate_labels(raw, self.n)

    def as_tuples(self) -> list[tuple[int, int, int]]:
        return [(lab.start, lab.end, lab.changes) for lab in self.labels]


@dataclass(frozen=True)
class Segmentation:
    """A solver result: changepoints, per-segment means, penalized cost.

    For finite ``penalty`` the cost is the square loss of the fitted
    means plus ``penalty`` per changepoint.  ``penalty == inf`` marks
    the limit model (one change per positive label, none elsewhere);
    its ``cost`` is the un-penalized square loss.
    """

    changepoints: tuple[int, ...]
    means: tuple[float, ...]
    cost: float
    penalty: float

    @property
    def n_segments(self) -> int:
        return len(self.changepoints) + 1

    def segments(self, n: int) -> list[tuple[int, int, float]]:
        """(start, end, mean) triples with 1-based inclusive bounds."""
        bounds = [0, *self.changepoints, n]
        return [
            (bounds[i] + 1, bounds[i + 1], self.means[i])
            for i in range(len(self.means))
        ]


@dataclass
class DpState:
    """Internal state of one dynamic-programming solve.

    ``W[t]`` is the optimal cost of the first ``t`` points (``W[0] ==
    -penalty``), ``tau_star[t]`` the chosen last changepoint, and
    ``mean_at[t]`` the mean of the final segment ending at ``t``.
    Entries for ``t`` in the negative region are skipped (left +inf /
    0) because such ``t`` can never be a last-change candidate.
    ``candidates`` is the admissible candidate set at the final point.
    """

    W: np.ndarray
    tau_star: np.ndarray
    candidates: tuple[int, ...]
    mean_at: np.ndarray


def validate_labels(
    raw_labels: Sequence[tuple[int, int, int]], n: int
) -> LabelSet:
    """Check, sort, and seal a list of ``(start, end, changes)`` labels.

    Rejects out-of-range positions, ``start >= end``, ``changes``
    outside {0, 1} (reporting the raw input index), and overlapping
    regions (reporting the start-sorted index).  Adjacent labels may
    share a boundary point (``end == next start``).
    """
    if n < 1:
        raise ValueError(f"sequence length must be >= 1, got {n}")
    checked: list[Label] = []
    for i, item in enumerate(raw_labels):
        try:
            fields = tuple(item)
            if len(fields) != 3 or any(
                isinstance(v, float) and not v.is_integer() for v in fields
            ):
                raise ValueError
            start, end, changes = (int(v) for v in fields)
        except (TypeError, ValueError):
            raise LabelValidationError(
                f"label {i}: expected (start, end, changes) integers, got {item!r}",
                index=i,
            ) from None
        if not 1 <= start <= n - 1:
            raise LabelValidationError(
                f"label {i}: start {start} outside [1, {n - 1}]", index=i
            )
        if not 2 <= end <= n:
            raise LabelValidationError(
                f"label {i}: end {end} outside [2, {n}]", index=i
            )
        if start >= end:
            raise LabelValidationError(
                f"label {i}: start {start} must be < end {end}", index=i
            )
        if changes not in (0, 1):
            raise LabelValidationError(
                f"label {i}: changes must be 0 or 1, got {changes}", index=i
            )
        checked.append(Label(start, end, changes))
    ordered = sorted(checked, key=lambda lab: (lab.start, lab.end))
    for j in range(1, len(ordered)):
        if ordered[j - 1].end > ordered[j].start:
            raise LabelValidationError(
                f"label {j} (sorted): region ({ordered[j].start}, {ordered[j].end}) "
                f"overlaps previous region ({ordered[j - 1].start}, {ordered[j - 1].end})",
                index=j,
            )
    negative: set[int] = set()
    for lab in ordered:
        if lab.changes == 0:
            negative.update(range(lab.start, lab.end))
    return LabelSet(tuple(ordered), frozenset(negative), n)


def segment_loss(seq: DataSequence, p: int, q: int) -> float:
    """Optimal square loss of one segment covering points ``p..q``.

    Equals ``min_mu sum_{i=p..q} (mu - x_i)^2``, computed from prefix
    sums and clamped at zero (cancellation can produce tiny negatives).
    """
    _check_range(seq.n, p, q)
    d = seq.cum_sum[q] - seq.cum_sum[p - 1]
    loss = seq.cum_sq[q] - seq.cum_sq[p - 1] - d * d / (q - p + 1)
    return float(loss) if loss > 0.0 else 0.0


def segment_mean(seq: DataSequence, p: int, q: int) -> float:
    """The loss-minimizing mean of points ``p..q`` (their average)."""
    _check_range(seq.n, p, q)
    return float((seq.cum_sum[q] - seq.cum_sum[p - 1]) / (q - p + 1))


def _check_range(n: int, p: int, q: int) -> None:
    if not (1 <= p <= q <= n):
        raise ValueError(f"invalid segment bounds p={p}, q={q} for n={n}")


def last_label_index(labels: LabelSet, t: int) -> int:
    """1-based index of the last label with ``start < t`` (0 if none)."""
    if not 1 <= t <= labels.n:
        raise ValueError(f"position t={t} outside [1, {labels.n}]")
    starts = [lab.start for lab in labels.labels]
    return bisect_left(starts, t)


def count_changes(changepoints: Sequence[int], p: int, q: int) -> int:
    """Number of changepoints at indices ``{p, ..., q - 1}``."""
    if not 1 <= p <= q:
        raise ValueError(f"invalid range p={p}, q={q}")
    cps = sorted(changepoints)
    return bisect_left(cps, q) - bisect_left(cps, p)


def candidate_set_update(prev: Iterable[int], t: int, labels: LabelSet) -> set[int]:
    """One step of the admissible last-changepoint recursion.

    Starting from ``T_0 = {}``: keep the previous set while ``t`` is
    inside a negative label (through its end) or strictly inside a
    positive label; reset to the positive label's governed indices at
    its end; otherwise append ``t - 1``.
    """
    for lab in labels.labels:
        if lab.changes == 0 and lab.start + 1 <= t <= lab.end:
            return set(prev)
        if lab.changes == 1 and lab.start + 1 <= t <= lab.end - 1:
            return set(prev)
        if lab.changes == 1 and t == lab.end:
            return set(range(lab.start, t))
    return set(prev) | {t - 1}


# Per-position dispatch codes for the DP kernel.
_CASE_APPEND = 0
_CASE_KEEP = 1
_CASE_RESET = 2


def _label_case_arrays(labels: LabelSet, n: int):
    """Vectorized form of the candidate-set cases plus the skip mask.

    ``skip[t]`` is True for t in the negative region: those positions
    never become candidates, so their cost entries are never read and
    the minimization there is skipped.  The case update itself still
    runs at every t (the append case can fire at a negative label's
    start position).
    """
    case = np.zeros(n + 1, dtype=np.int8)
    reset_start = np.zeros(n + 1, dtype=np.int64)
    skip = np.zeros(n + 1, dtype=np.bool_)
    for lab in labels.labels:
        if lab.changes == 0:
            case[lab.start + 1 : lab.end + 1] = _CASE_KEEP
            skip[lab.start : lab.end] = True
        else:
            case[lab.start + 1 : lab.end] = _CASE_KEEP
            case[lab.end] = _CASE_RESET
            reset_start[lab.end] = lab.start
    return case, reset_start, skip


@njit(cache=True)
def _dp_kernel(cum_sum, cum_sq, penalty, case, reset_start, skip):  # pragma: no cover
    n = cum_sum.shape[0] - 1
    W = np.full(n + 1, np.inf)
    W[0] = -penalty
    tau_star = np.zeros(n + 1, dtype=np.int64)
    mean_at = np.zeros(n + 1, dtype=np.float64)
    cand = np.empty(n, dtype=np.int64)
    m = 0
    for t in range(1, n + 1):
        c = case[t]
        if c == 0:
            cand[m] = t - 1
            m += 1
        elif c == 2:
            m = 0
            for tau in range(reset_start[t], t):
                cand[m] = tau
                m += 1
        if skip[t]:
            continue
        if m == 0:
            return W, tau_star, mean_at, cand[:0], False
        best = np.inf
        best_tau = -1
        s_t = cum_sum[t]
        q_t = cum_sq[t]
        for k in range(m):
            tau = cand[k]
            d = s_t - cum_sum[tau]
            loss = q_t - cum_sq[tau] - d * d / (t - tau)
            if loss < 0.0:
                loss = 0.0
            cost = W[tau] + penalty + loss
            if cost < best:
                best = cost
                best_tau = tau
        W[t] = best
        tau_star[t] = best_tau
        mean_at[t] = (s_t - cum_sum[best_tau]) / (t - best_tau)
    return W, tau_star, mean_at, cand[:m], True


_EMPTY_CASES: dict[int, tuple] = {}


def _no_label_cases(n: int):
    # Cached: the unconstrained solver reuses the same all-zero arrays.
    if n not in _EMPTY_CASES:
        if len(_EMPTY_CASES) > 64:
            _EMPTY_CASES.clear()
        _EMPTY_CASES[n] = (
            np.zeros(n + 1, dtype=np.int8),
            np.zeros(n + 1, dtype=np.int64),
            np.zeros(n + 1, dtype=np.bool_),
        )
    return _EMPTY_CASES[n]


def _decode(seq: DataSequence, W, tau_star, penalty: float) -> Segmentation:
    n = seq.n
    cps: list[int] = []
    t = n
    while t > 0:
        tau = int(tau_star[t])
        if tau == 0:
            break
        cps.append(tau)
        t = tau
    cps.reverse()
    bounds = [0, *cps, n]
    means = tuple(
        float(
            (seq.cum_sum[bounds[i + 1]] - seq.cum_sum[bounds[i]])
            / (bounds[i + 1] - bounds[i])
        )
        for i in range(len(bounds) - 1)
    )
    return Segmentation(tuple(cps), means, float(W[n]), penalty)


def _check_penalty(penalty: float) -> float:
    penalty = float(penalty)
    if not math.isfinite(penalty) or penalty < 0:
        raise ValueError(f"penalty must be finite and >= 0, got {penalty}")
    return penalty


def dp_solve(
    seq: DataSequence, labels: LabelSet, penalty: float
) -> tuple[Segmentation, DpState]:
    """Run the label-constrained DP and return the result with its state."""
    penalty = _check_penalty(penalty)
    if labels.n != seq.n:
        raise ValueError(
            f"labels were validated for n={labels.n}, sequence has n={seq.n}"
        )
    case, reset_start, skip = _label_case_arrays(labels, seq.n)
    W, tau_star, mean_at, cand, ok = _dp_kernel(
        seq.cum_sum, seq.cum_sq, penalty, case, reset_start, skip
    )
    if not ok:
        # Unreachable for labels accepted by validate_labels.
        raise AssertionError("empty candidate set during dynamic programming")
    seg = _decode(seq, W, tau_star, penalty)
    state = DpState(W, tau_star, tuple(int(v) for v in cand), mean_at)
    return seg, state


def opart(seq: DataSequence, penalty: float) -> Segmentation:
    """Optimal penalized segmentation, ignoring any labels."""
    penalty = _check_penalty(penalty)
    case, reset_start, skip = _no_label_cases(seq.n)
    W, tau_star, _, _, ok = _dp_kernel(
        seq.cum_sum, seq.cum_sq, penalty, case, reset_start, skip
    )
    assert ok
    return _decode(seq, W, tau_star, penalty)


def lopart(seq: DataSequence, labels: LabelSet, penalty: float) -> Segmentation:
    """Optimal penalized segmentation consistent with every label.

    With no labels this reduces exactly to :func:`opart`.  For valid
    0/1 labels a feasible solution always exists.
    """
    seg, _ = dp_solve(seq, labels, penalty)
    return seg


def lopart_infinite(seq: DataSequence, labels: LabelSet) -> Segmentation:
    """The infinite-penalty limit model.

    Places exactly one changepoint in each positive label and none
    anywhere else, by completing the label set with negative labels
    over every unlabeled gap and solving with zero penalty.  The
    returned cost is the un-penalized square loss; ``penalty`` is
    ``inf`` to mark the limit model.
    """
    if labels.n != seq.n:
        raise ValueError(
            f"labels were validated for n={labels.n}, sequence has n={seq.n}"
        )
    n = seq.n
    positive = [lab for lab in labels.labels if lab.changes == 1]
    full: list[tuple[int, int, int]] = [(lab.start, lab.end, 1) for lab in positive]
    cursor = 1
    for lab in positive:
        if cursor < lab.start:
            full.append((cursor, lab.start, 0))
        cursor = lab.end
    if cursor < n:
        full.append((cursor, n, 0))
    seg, _ = dp_solve(seq, validate_labels(full, n), 0.0)
    return Segmentation(seg.changepoints, seg.means, seg.cost, math.inf)


def objective_value(
    seq: DataSequence, changepoints: Sequence[int], penalty: float
) -> float:
    """Penalized square-loss objective of a given changepoint set."""
    bounds = [0, *sorted(changepoints), seq.n]
    loss = sum(
        segment_loss(seq, bounds[i] + 1, bounds[i + 1])
        for i in range(len(bounds) - 1)
    )
    return loss + penalty * len(changepoints)


def brute_force_solve(
    seq: DataSequence, labels: LabelSet, penalty: float
) -> Segmentation:
    """Exhaustive oracle: best feasible changepoint subset, small N only.

    Enumerates all 2^(N-1) subsets, keeps those matching every label's
    change count, and picks the cheapest.  Cost accumulates in the same
    order as the DP recursion so exact floating-point ties resolve
    identically, and ties break to the subset whose changepoints, read
    from the last backwards, are smallest.
    """
    penalty = _check_penalty(penalty)
    n = seq.n
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(
            f"brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {n}"
        )
    if labels.n != n:
        raise ValueError(
            f"labels were validated for n={labels.n}, sequence has n={n}"
        )
    spans = [
        (lab.start - 1, (1 << (lab.end - lab.start)) - 1, lab.changes)
        for lab in labels.labels
    ]
    S = seq.cum_sum
    Q = seq.cum_sq
    best_cost = math.inf
    best_key: tuple[int, ...] = ()
    best_cps: list[int] = []
    found = False
    for mask in range(1 << (n - 1)):
        feasible = True
        for shift, window, expected in spans:
            if ((mask >> shift) & window).bit_count() != expected:
                feasible = False
                break
        if not feasible:
            continue
        cps = [i + 1 for i in range(n - 1) if (mask >> i) & 1]
        acc = -penalty
        prev = 0
        for c in (*cps, n):
            d = S[c] - S[prev]
            loss = Q[c] - Q[prev] - d * d / (c - prev)
            if loss < 0.0:
                loss = 0.0
            acc = acc + penalty + loss
            prev = c
        key = tuple(reversed(cps))
        if not found or acc < best_cost or (acc == best_cost and key < best_key):
            best_cost = acc
            best_key = key
            best_cps = cps
            found = True
    assert found, "no feasible subset; labels must be invalid"
    bounds = [0, *best_cps, n]
    means = tuple(
        float((S[bounds[i + 1]] - S[bounds[i]]) / (bounds[i + 1] - bounds[i]))
        for i in range(len(bounds) - 1)
    )
    return Segmentation(tuple(best_cps), means, float(best_cost), penalty)
