"""Acceptance suite: one test per release criterion.

Run with ``pytest tests/test_acceptance.py -v`` for per-criterion
pass/fail lines (printed summaries also appear with ``-s``).
"""

import math
import time

import numpy as np
import pytest

from conftest import random_instance
from lopart import (
    CORRECT,
    PENALTY_GRID,
    brute_force_solve,
    candidate_set_update,
    classify_label,
    count_changes,
    dp_solve,
    lopart,
    lopart_infinite,
    opart,
    validate_labels,
)
from lopart.bench import BenchConfig, Density, fit_slope, generate_corpus, run_benchmark
from lopart.cli import main
from lopart.formats import read_report, write_corpus
from lopart.penalty import (
    PenaltyModel,
    TargetInterval,
    bic_penalty,
    fit_linear2,
    predict_penalty,
    squared_hinge_gradient,
    squared_hinge_loss,
)


def _ok(name):
    print(f"ACCEPTANCE {name}: PASS")


def test_oracle_equivalence():
    """Constrained and unconstrained solvers match exhaustive search."""
    started = time.perf_counter()
    rng = np.random.default_rng(0xA11CE)
    penalties = (0.0, 0.5, 1.0, 10.0, 1000.0)
    for _ in range(200):
        seq, labels = random_instance(rng, n_lo=3, n_hi=12, m_max=3)
        empty = validate_labels([], seq.n)
        for lam in penalties:
            constrained = lopart(seq, labels, lam)
            oracle = brute_force_solve(seq, labels, lam)
            assert constrained.cost == pytest.approx(
                oracle.cost, rel=1e-9, abs=1e-12
            )
            assert constrained.changepoints == oracle.changepoints
            for lab in labels.labels:
                assert (
                    count_changes(constrained.changepoints, lab.start, lab.end)
                    == lab.changes
                )
            unconstrained = opart(seq, lam)
            free_oracle = brute_force_solve(seq, empty, lam)
            assert unconstrained.cost == pytest.approx(
                free_oracle.cost, rel=1e-9, abs=1e-12
            )
            assert unconstrained.changepoints == free_oracle.changepoints
    elapsed = time.perf_counter() - started
    assert elapsed < 60.0, f"oracle suite took {elapsed:.1f}s, budget is 60s"
    _ok("oracle equivalence (200 instances x 5 penalties)")


def test_zero_train_errors():
    """Every label is classified correct under the constrained solvers."""
    rng = np.random.default_rng(0xBEEF)
    for _ in range(500):
        seq, labels = random_instance(
            rng, n_lo=3, n_hi=40, m_max=4, shared_boundaries=True
        )
        fits = [lopart(seq, labels, lam) for lam in (0.0, 1.0, 10.0)]
        fits.append(lopart_infinite(seq, labels))
        for seg in fits:
            for i, lab in enumerate(labels.labels):
                assert classify_label(lab, seg.changepoints, i).status == CORRECT
    _ok("zero train errors (500 instances, penalties 0/1/10/inf)")


def test_no_label_equivalence():
    """With no labels the two solvers are byte-identical."""
    rng = np.random.default_rng(0xC0FFEE)
    for _ in range(100):
        seq, _ = random_instance(rng, n_lo=3, n_hi=30, m_max=0)
        empty = validate_labels([], seq.n)
        for lam in (0.0, 1.0, 17.5):
            a = lopart(seq, empty, lam)
            b = opart(seq, lam)
            assert a == b
            assert repr(a) == repr(b)
    _ok("no-label equivalence (100 instances)")


def test_infinite_penalty_contract():
    """Exactly one change inside each positive label, zero elsewhere."""
    rng = np.random.default_rng(0xD1CE)
    for _ in range(100):
        seq, labels = random_instance(rng, n_lo=4, n_hi=40, m_max=4)
        seg = lopart_infinite(seq, labels)
        positives = [lab for lab in labels.labels if lab.changes == 1]
        assert len(seg.changepoints) == len(positives)
        for lab in positives:
            assert count_changes(seg.changepoints, lab.start, lab.end) == 1
        for cp in seg.changepoints:
            assert any(lab.start <= cp <= lab.end - 1 for lab in positives)
    _ok("infinite-penalty contract (100 instances)")


def test_candidate_set_fixture():
    """The documented two-label candidate set at t=100 is exact."""
    labels = validate_labels([(45, 55, 1), (80, 90, 0)], 100)
    expected = set(range(45, 80)) | set(range(90, 100))
    current: set[int] = set()
    for t in range(1, 101):
        current = candidate_set_update(current, t, labels)
    assert current == expected
    seq, _ = random_instance(np.random.default_rng(1), n_lo=100, n_hi=100, m_max=0)
    _, state = dp_solve(seq, labels, 10.0)
    assert set(state.candidates) == expected
    _ok("candidate-set fixture T_100")


def test_opart_monotonicity():
    """Changepoint count never increases along the penalty grid."""
    rng = np.random.default_rng(0xFACE)
    for _ in range(50):
        seq, _ = random_instance(rng, n_lo=20, n_hi=60, m_max=0)
        counts = [len(opart(seq, lam).changepoints) for lam in PENALTY_GRID]
        assert all(a >= b for a, b in zip(counts, counts[1:]))
    _ok("unconstrained changepoint count monotone over the grid (50 instances)")


def test_timing_shape():
    """Growth exponents: near-linear constrained (dense labels), near-
    quadratic unconstrained, and parity when no labels exist."""
    started = time.perf_counter()
    dense = run_benchmark(
        BenchConfig(n_values=(1000, 10_000, 100_000), scheme=Density(0.1), repeats=3)
    )
    lopart_slope = fit_slope(dense, "lopart")
    assert 0.8 <= lopart_slope <= 1.4, f"constrained slope {lopart_slope:.2f}"
    unlabeled = run_benchmark(
        BenchConfig(n_values=(1000, 3000, 10_000), scheme=Density(0.0), repeats=3)
    )
    opart_slope = fit_slope(unlabeled, "opart")
    assert 1.7 <= opart_slope <= 2.3, f"unconstrained slope {opart_slope:.2f}"
    at_1e4 = {
        row.algorithm: row.median_seconds
        for row in unlabeled
        if row.n == 10_000
    }
    ratio = max(at_1e4.values()) / min(at_1e4.values())
    assert ratio <= 2.0, f"no-label runtime ratio {ratio:.2f}"
    elapsed = time.perf_counter() - started
    assert elapsed < 600.0, f"timing suite took {elapsed:.0f}s, budget is 600s"
    _ok(
        f"timing shape (constrained slope {lopart_slope:.2f}, "
        f"unconstrained slope {opart_slope:.2f}, parity ratio {ratio:.2f})"
    )


def test_penalty_learning():
    """BIC values, the exact linear-model correspondence, gradient
    correctness, and monotone descent."""
    assert bic_penalty(39) == math.log(39)
    identity = PenaltyModel("linear2", 1.0, 0.0)
    for n in range(10, 100_001):
        assert predict_penalty(identity, n) == math.log(n)

    rng = np.random.default_rng(0x9EAD)
    x = rng.uniform(0.5, 2.5, size=8)
    lo = rng.uniform(-2.0, 4.0, size=8)
    hi = lo + rng.uniform(0.5, 5.0, size=8)
    lo[0], hi[1] = -math.inf, math.inf
    h = 1e-5
    for _ in range(20):
        w = float(rng.uniform(-3, 3))
        b = float(rng.uniform(-5, 5))
        gw, gb = squared_hinge_gradient(w, b, x, lo, hi)
        num_w = (
            squared_hinge_loss(w + h, b, x, lo, hi)
            - squared_hinge_loss(w - h, b, x, lo, hi)
        ) / (2 * h)
        num_b = (
            squared_hinge_loss(w, b + h, x, lo, hi)
            - squared_hinge_loss(w, b - h, x, lo, hi)
        ) / (2 * h)
        assert gw == pytest.approx(num_w, rel=1e-4, abs=1e-6)
        assert gb == pytest.approx(num_b, rel=1e-4, abs=1e-6)

    model = fit_linear2(
        list(rng.uniform(0.8, 2.5, size=10)),
        [
            TargetInterval(low, low + float(rng.uniform(2.5, 6.0)))
            for low in rng.uniform(-2.0, 6.0, size=10)
        ],
    )
    history = np.array(model.loss_history)
    assert np.all(np.diff(history) <= 1e-9)
    assert history[-1] <= history[0]
    _ok("penalty learning (BIC identity, gradients, monotone descent)")


def test_cv_pipeline(tmp_path):
    """End-to-end cross-validation on the synthetic corpus is
    deterministic and honors the solver guarantees in every row."""
    corpus_dir = tmp_path / "corpus"
    write_corpus(str(corpus_dir), generate_corpus(20, 200, 4, seed=0))
    outputs = []
    for run in ("a", "b"):
        report = tmp_path / f"report_{run}.csv"
        code = main(
            ["cv", str(corpus_dir), "--k", "2", "--mode", "random",
             "--seed", "11", "--out", str(report)]
        )
        assert code == 0
        roc = tmp_path / f"report_{run}.roc.csv"
        outputs.append((report.read_bytes(), roc.read_bytes()))
    assert outputs[0] == outputs[1], "reports differ between identical runs"

    rows = read_report(str(tmp_path / "report_a.csv"))
    assert len(rows) == 20 * 2 * (3 + 6)
    for row in rows:
        if row["algorithm"] == "lopart":
            assert row["train_fp"] == "0" and row["train_fn"] == "0"
        if row["algorithm"] == "segannot":
            assert row["test_fp"] == "0"
    _ok("cross-validation pipeline (deterministic, 20-sequence corpus)")
