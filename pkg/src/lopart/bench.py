"""Simulated data, structured labels, and runtime scaling measurements.

The benchmark times both solvers on seeded standard-normal sequences
with labels generated by one of two schemes:

* ``FixedCount(m, width, spacing)`` — m positive labels of the given
  width placed every ``spacing`` positions from position 1.
* ``Density(ratio)`` — ``floor(ratio * n)`` positive labels tiling the
  sequence evenly (width = spacing - 1), so higher density means more
  of the sequence is labeled and the constrained solver's candidate
  sets stay small.

Timed solves run strictly sequentially on one thread; the first solve
per configuration is a discarded warm-up (it also absorbs JIT
compilation and doubles as a correctness guard).  ``fit_slope`` turns
the timing rows into a log-log growth exponent.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .core import DataSequence, LabelSet, lopart, opart, validate_labels
from .crossval import CorpusSequence
from .metrics import total_errors

__all__ = [
    "FixedCount",
    "Density",
    "BenchConfig",
    "TimingRow",
    "simulate_normal",
    "generate_labels",
    "run_benchmark",
    "fit_slope",
    "generate_corpus",
]


@dataclass(frozen=True)
class FixedCount:
    m: int
    width: int
    spacing: int


@dataclass(frozen=True)
class Density:
    ratio: float


@dataclass(frozen=True)
class BenchConfig:
    """Benchmark plan; needs repeats >= 3 for median plus quartiles."""

    n_values: tuple[int, ...]
    scheme: FixedCount | Density
    repeats: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.repeats < 3:
            raise ValueError(f"repeats must be >= 3, got {self.repeats}")
        if not self.n_values:
            raise ValueError("n_values must be nonempty")


@dataclass(frozen=True)
class TimingRow:
    algorithm: str
    n: int
    m: int
    median_seconds: float
    q25: float
    q75: float


def simulate_normal(n: int, seed) -> DataSequence:
    """``n`` i.i.d. standard-normal draws, deterministic per (n, seed)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    return DataSequence(rng.standard_normal(n))


def generate_labels(n: int, scheme: FixedCount | Density) -> LabelSet:
    """Positive labels per the scheme; rejects infeasible packings."""
    if isinstance(scheme, Density):
        if not 0.0 <= scheme.ratio < 1.0:
            raise ValueError(f"density ratio must be in [0, 1), got {scheme.ratio}")
        m = int(scheme.ratio * n)
        if m == 0:
            return validate_labels([], n)
        spacing = n // m
        scheme = FixedCount(m, spacing - 1, spacing)
    if scheme.m == 0:
        return validate_labels([], n)
    if scheme.width < 1 or scheme.spacing < scheme.width:
        raise ValueError(
            f"need 1 <= width <= spacing, got width={scheme.width}, "
            f"spacing={scheme.spacing}"
        )
    last_end = 1 + (scheme.m - 1) * scheme.spacing + scheme.width
    if last_end > n:
        raise ValueError(
            f"{scheme.m} labels of width {scheme.width} every {scheme.spacing} "
            f"do not fit in n={n}"
        )
    raw = [
        (1 + k * scheme.spacing, 1 + k * scheme.spacing + scheme.width, 1)
        for k in range(scheme.m)
    ]
    return validate_labels(raw, n)


def run_benchmark(config: BenchConfig) -> list[TimingRow]:
    """Median/quartile wall-clock times of both solvers per size."""
    rows: list[TimingRow] = []
    for n in config.n_values:
        labels = generate_labels(n, config.scheme)
        m = len(labels)
        penalty = math.log(n) if n >= 2 else 1.0
        opart_times: list[float] = []
        lopart_times: list[float] = []
        for rep in range(config.repeats + 1):
            seq = simulate_normal(n, [config.seed, n, rep])
            t0 = time.perf_counter()
            seg_opart = opart(seq, penalty)
            t1 = time.perf_counter()
            seg_lopart = lopart(seq, labels, penalty)
            t2 = time.perf_counter()
            if rep == 0:
                _correctness_guard(labels, m, seg_opart, seg_lopart)
                continue
            opart_times.append(t1 - t0)
            lopart_times.append(t2 - t1)
        for algorithm, times in (("opart", opart_times), ("lopart", lopart_times)):
            q25, med, q75 = np.percentile(times, [25, 50, 75])
            rows.append(TimingRow(algorithm, n, m, float(med), float(q25), float(q75)))
    rows.sort(key=lambda r: (r.algorithm, r.n, r.m))
    return rows


def _correctness_guard(labels, m, seg_opart, seg_lopart):
    # Benchmarks must never time a wrong answer.
    if m == 0:
        assert seg_opart == seg_lopart, "solvers disagree with no labels"
    else:
        errors = total_errors(labels, seg_lopart.changepoints)
        assert errors.total == 0, "constrained solver violated a label"


def fit_slope(rows: list[TimingRow], algorithm: str) -> float:
    """Least-squares slope of log median time vs log n for one solver."""
    points = sorted(
        {(row.n, row.median_seconds) for row in rows if row.algorithm == algorithm}
    )
    if len({n for n, _ in points}) < 3:
        raise ValueError("need at least 3 distinct n values to fit a slope")
    log_n = np.log([n for n, _ in points])
    log_t = np.log([t for _, t in points])
    slope, _ = np.polyfit(log_n, log_t, 1)
    return float(slope)


def generate_corpus(
    n_sequences: int = 20,
    n: int = 200,
    labels_per_sequence: int = 4,
    seed: int = 0,
) -> list[CorpusSequence]:
    """Seeded synthetic corpus with known changes and mixed labels.

    Each sequence is unit-variance noise around a piecewise-constant
    mean with ``labels_per_sequence // 2`` true changes; every change
    gets a positive label around it, and quiet stretches get negative
    labels, alternating so each sequence carries both polarities.
    """
    if labels_per_sequence < 2 or labels_per_sequence % 2:
        raise ValueError("labels_per_sequence must be an even count >= 2")
    changes = labels_per_sequence // 2
    if n < 40 * (changes + 1):
        raise ValueError(f"n={n} too short for {changes} labeled changes")
    corpus: list[CorpusSequence] = []
    for i in range(n_sequences):
        rng = np.random.default_rng([seed, i])
        block = n // (changes + 1)
        positions = [
            (j + 1) * block + int(rng.integers(-block // 8, block // 8 + 1))
            for j in range(changes)
        ]
        values = rng.standard_normal(n)
        for pos in positions:
            step = float(rng.uniform(2.5, 4.0)) * float(rng.choice([-1.0, 1.0]))
            values[pos:] += step
        raw = []
        for pos in positions:
            raw.append((pos - 19, pos - 9, 0))
            raw.append((pos - 7, pos + 8, 1))
        corpus.append(
            CorpusSequence(
                f"seq{i:03d}", DataSequence(values), validate_labels(raw, n)
            )
        )
    return corpus
