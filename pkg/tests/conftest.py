"""Shared helpers: seeded random problem instances."""

from __future__ import annotations

import numpy as np

from lopart import DataSequence, LabelSet, validate_labels


def random_instance(
    rng: np.random.Generator,
    n_lo: int = 3,
    n_hi: int = 12,
    m_max: int = 3,
    shared_boundaries: bool = False,
) -> tuple[DataSequence, LabelSet]:
    """A random sequence (noise, sometimes with a mean step) plus labels.

    Labels are disjoint random regions with random 0/1 polarity; when
    ``shared_boundaries`` is set, adjacent regions sometimes touch.
    """
    n = int(rng.integers(n_lo, n_hi + 1))
    values = rng.standard_normal(n)
    if n >= 4 and rng.random() < 0.6:
        pos = int(rng.integers(1, n))
        sign = 1.0 if rng.random() < 0.5 else -1.0
        values[pos:] += sign * rng.uniform(1.0, 5.0)
    m_cap = min(m_max, n // 2)
    m = int(rng.integers(0, m_cap + 1))
    raw: list[tuple[int, int, int]] = []
    if m:
        bounds = sorted(
            int(b) for b in rng.choice(np.arange(1, n + 1), size=2 * m, replace=False)
        )
        pairs = [
            [bounds[2 * j], bounds[2 * j + 1]] for j in range(m)
        ]
        if shared_boundaries and m >= 2 and rng.random() < 0.5:
            j = int(rng.integers(0, m - 1))
            pairs[j + 1][0] = pairs[j][1]
        raw = [(s, e, int(rng.integers(0, 2))) for s, e in pairs]
    return DataSequence(values), validate_labels(raw, n)
