import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from conftest import random_instance
from lopart import (
    DataSequence,
    LabelValidationError,
    brute_force_solve,
    candidate_set_update,
    count_changes,
    dp_solve,
    last_label_index,
    lopart,
    lopart_infinite,
    objective_value,
    opart,
    segment_loss,
    segment_mean,
    validate_labels,
)


def seq_of(*values):
    return DataSequence(np.array(values, dtype=float))


class TestDataSequence:
    def test_prefix_sums(self):
        seq = seq_of(1, 2, 3)
        assert seq.cum_sum.tolist() == [0, 1, 3, 6]
        assert seq.cum_sq.tolist() == [0, 1, 5, 14]
        assert seq.n == 3

    def test_rejects_empty_and_nonfinite(self):
        with pytest.raises(ValueError):
            DataSequence(np.array([]))
        with pytest.raises(ValueError):
            DataSequence(np.array([1.0, np.nan]))
        with pytest.raises(ValueError):
            DataSequence(np.array([1.0, np.inf]))


class TestSegmentLoss:
    def test_constant_segment(self):
        seq = seq_of(5, 5, 5)
        assert segment_loss(seq, 1, 3) == 0.0
        assert segment_mean(seq, 1, 3) == 5.0

    def test_two_points(self):
        seq = seq_of(1, 3)
        assert segment_loss(seq, 1, 2) == pytest.approx(2.0)
        assert segment_mean(seq, 1, 2) == 2.0

    def test_matches_scalar_minimization(self):
        rng = np.random.default_rng(42)
        seq = DataSequence(rng.standard_normal(10) * 3 + 1)
        for _ in range(20):
            p = int(rng.integers(1, 11))
            q = int(rng.integers(p, 11))
            direct = minimize_scalar(
                lambda mu: float(np.sum((mu - seq.values[p - 1 : q]) ** 2)),
                bounds=(-20, 20),
                method="bounded",
                options={"xatol": 1e-10},
            )
            assert segment_loss(seq, p, q) == pytest.approx(
                direct.fun, rel=1e-9, abs=1e-12
            )
            assert segment_mean(seq, p, q) == pytest.approx(
                float(np.mean(seq.values[p - 1 : q])), rel=1e-12
            )

    def test_large_sequence_agrees_with_direct_sum(self):
        rng = np.random.default_rng(7)
        seq = DataSequence(rng.standard_normal(100_000) + 5.0)
        for p, q in [(1, 100_000), (50, 99_000), (99_990, 100_000), (123, 123)]:
            mean = float(np.mean(seq.values[p - 1 : q]))
            direct = float(np.sum((seq.values[p - 1 : q] - mean) ** 2))
            loss = segment_loss(seq, p, q)
            assert loss >= 0.0
            assert loss == pytest.approx(direct, rel=1e-8, abs=1e-8)

    def test_rejects_bad_bounds(self):
        seq = seq_of(1, 2, 3)
        with pytest.raises(ValueError):
            segment_loss(seq, 2, 1)
        with pytest.raises(ValueError):
            segment_loss(seq, 0, 2)
        with pytest.raises(ValueError):
            segment_loss(seq, 1, 4)


class TestValidateLabels:
    def test_sorts_and_builds_negative_region(self):
        labels = validate_labels([(4, 7, 1), (1, 2, 0)], 10)
        assert labels.as_tuples() == [(1, 2, 0), (4, 7, 1)]
        assert labels.negative_region == frozenset({1})

    def test_empty(self):
        labels = validate_labels([], 5)
        assert len(labels) == 0
        assert labels.negative_region == frozenset()

    def test_overlap_rejected_with_index(self):
        with pytest.raises(LabelValidationError) as err:
            validate_labels([(1, 3, 1), (2, 4, 0)], 5)
        assert err.value.index == 1

    def test_shared_boundary_allowed(self):
        labels = validate_labels([(1, 3, 1), (3, 5, 0)], 5)
        assert labels.negative_region == frozenset({3, 4})

    @pytest.mark.parametrize(
        "raw, n",
        [
            ([(0, 2, 1)], 5),
            ([(5, 6, 1)], 5),
            ([(1, 6, 1)], 5),
            ([(3, 3, 1)], 5),
            ([(4, 2, 1)], 5),
            ([(1, 2, 2)], 5),
            ([(1, 2, -1)], 5),
        ],
    )
    def test_rejects_bad_fields(self, raw, n):
        with pytest.raises(LabelValidationError) as err:
            validate_labels(raw, n)
        assert err.value.index == 0


class TestLastLabelIndex:
    def test_examples(self):
        one = validate_labels([(4, 7, 1)], 10)
        assert last_label_index(one, 3) == 0
        assert last_label_index(one, 5) == 1
        two = validate_labels([(1, 2, 0), (4, 7, 1)], 10)
        assert last_label_index(two, 10) == 2


class TestCandidateSetUpdate:
    def test_no_labels_appends(self):
        labels = validate_labels([], 10)
        assert candidate_set_update({0, 1, 2, 3}, 5, labels) == {0, 1, 2, 3, 4}

    def test_positive_label_end_resets(self):
        labels = validate_labels([(1, 3, 1)], 5)
        t2 = candidate_set_update({0}, 2, labels)
        assert candidate_set_update(t2, 3, labels) == {1, 2}

    def test_documented_candidate_fixture(self):
        labels = validate_labels([(45, 55, 1), (80, 90, 0)], 100)
        current: set[int] = set()
        for t in range(1, 101):
            current = candidate_set_update(current, t, labels)
        assert current == set(range(45, 80)) | set(range(90, 100))


class TestCountChanges:
    def test_examples(self):
        assert count_changes([2, 4], 1, 5) == 2
        assert count_changes([2, 4], 2, 4) == 1
        assert count_changes([2, 4], 3, 3) == 0

    def test_rejects_bad_range(self):
        with pytest.raises(ValueError):
            count_changes([2], 3, 2)


class TestOpart:
    def test_two_level_step(self):
        seg = opart(seq_of(1, 1, 5, 5), 1.0)
        assert seg.changepoints == (2,)
        assert seg.means == (1.0, 5.0)
        assert seg.cost == pytest.approx(1.0, rel=1e-9)

    def test_constant_sequence_never_splits(self):
        for lam in (0.5, 1.0, 100.0):
            seg = opart(seq_of(3, 3, 3, 3, 3), lam)
            assert seg.changepoints == ()
            assert seg.cost == pytest.approx(0.0, abs=1e-12)

    def test_zero_penalty_reaches_zero_cost(self):
        seg = opart(seq_of(1, 9, 1), 0.0)
        assert seg.cost == pytest.approx(0.0, abs=1e-12)

    def test_rejects_bad_penalty(self):
        with pytest.raises(ValueError):
            opart(seq_of(1, 2), -1.0)
        with pytest.raises(ValueError):
            opart(seq_of(1, 2), math.inf)

    def test_single_point(self):
        seg = opart(seq_of(7), 1.0)
        assert seg.changepoints == ()
        assert seg.means == (7.0,)
        assert seg.cost == 0.0


class TestLopart:
    def test_forced_change(self):
        seq = seq_of(0, 0, 10)
        labels = validate_labels([(1, 3, 1)], 3)
        seg = lopart(seq, labels, 1.0)
        assert seg.changepoints == (2,)
        assert seg.cost == pytest.approx(1.0, rel=1e-9)

    def test_forced_change_survives_huge_penalty(self):
        seq = seq_of(0, 0, 10)
        labels = validate_labels([(1, 3, 1)], 3)
        seg = lopart(seq, labels, 1000.0)
        assert seg.changepoints == (2,)
        assert seg.cost == pytest.approx(1000.0, rel=1e-9)

    def test_no_labels_identical_to_opart(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            seq, _ = random_instance(rng, m_max=0)
            empty = validate_labels([], seq.n)
            for lam in (0.0, 1.0, 10.0):
                assert lopart(seq, empty, lam) == opart(seq, lam)

    def test_rejects_mismatched_length(self):
        labels = validate_labels([(1, 3, 1)], 5)
        with pytest.raises(ValueError):
            lopart(seq_of(1, 2, 3), labels, 1.0)


class TestLopartInfinite:
    def test_one_change_inside_positive_label(self):
        rng = np.random.default_rng(11)
        seq = DataSequence(rng.standard_normal(100))
        labels = validate_labels([(45, 55, 1)], 100)
        seg = lopart_infinite(seq, labels)
        assert len(seg.changepoints) == 1
        assert 45 <= seg.changepoints[0] <= 54
        assert math.isinf(seg.penalty)

    def test_no_labels_single_segment(self):
        seg = lopart_infinite(seq_of(1, 5, 2, 4), validate_labels([], 4))
        assert seg.changepoints == ()
        assert seg.means == (3.0,)

    def test_matches_placement_grid(self):
        rng = np.random.default_rng(5)
        seq = DataSequence(rng.standard_normal(10) + np.repeat([0.0, 4.0], 5))
        labels = validate_labels([(2, 4, 1), (6, 8, 1)], 10)
        best = None
        for c1 in (2, 3):
            for c2 in (6, 7):
                loss = sum(
                    segment_loss(seq, p, q)
                    for p, q in [(1, c1), (c1 + 1, c2), (c2 + 1, 10)]
                )
                if best is None or loss < best[0]:
                    best = (loss, (c1, c2))
        seg = lopart_infinite(seq, labels)
        assert seg.changepoints == best[1]
        assert seg.cost == pytest.approx(best[0], rel=1e-9)

    def test_cost_is_unpenalized_loss(self):
        rng = np.random.default_rng(9)
        seq = DataSequence(rng.standard_normal(30))
        labels = validate_labels([(5, 9, 1), (20, 25, 0)], 30)
        seg = lopart_infinite(seq, labels)
        assert seg.cost == pytest.approx(
            objective_value(seq, seg.changepoints, 0.0), rel=1e-9
        )


class TestBruteForce:
    def test_forced_flat_model(self):
        seq = seq_of(9, 0)
        labels = validate_labels([(1, 2, 0)], 2)
        seg = brute_force_solve(seq, labels, 0.0)
        assert seg.changepoints == ()
        assert seg.means == (4.5,)

    def test_agrees_with_documented_example(self):
        seq = seq_of(0, 0, 10)
        labels = validate_labels([(1, 3, 1)], 3)
        seg = brute_force_solve(seq, labels, 1.0)
        assert seg.changepoints == (2,)
        assert seg.cost == pytest.approx(1.0)

    def test_unconstrained_matches_opart_example(self):
        seq = seq_of(1, 1, 5, 5)
        seg = brute_force_solve(seq, validate_labels([], 4), 1.0)
        assert seg.changepoints == (2,)
        assert seg.cost == pytest.approx(1.0)

    def test_rejects_large_n(self):
        seq = DataSequence(np.zeros(17))
        with pytest.raises(ValueError):
            brute_force_solve(seq, validate_labels([], 17), 1.0)


class TestSolverProperties:
    def test_oracle_equivalence_sample(self):
        rng = np.random.default_rng(101)
        for _ in range(60):
            seq, labels = random_instance(rng, shared_boundaries=True)
            for lam in (0.0, 0.7, 5.0):
                dp = lopart(seq, labels, lam)
                oracle = brute_force_solve(seq, labels, lam)
                assert dp.cost == pytest.approx(oracle.cost, rel=1e-9, abs=1e-12)
                assert dp.changepoints == oracle.changepoints

    def test_labels_always_satisfied(self):
        rng = np.random.default_rng(202)
        for _ in range(50):
            seq, labels = random_instance(rng, n_hi=30, m_max=4)
            for lam in (0.0, 1.0, 50.0):
                seg = lopart(seq, labels, lam)
                for lab in labels.labels:
                    assert (
                        count_changes(seg.changepoints, lab.start, lab.end)
                        == lab.changes
                    )

    def test_candidates_disjoint_from_negative_region_and_nonempty(self):
        rng = np.random.default_rng(303)
        for _ in range(30):
            seq, labels = random_instance(rng, n_hi=25, m_max=3)
            current: set[int] = set()
            for t in range(1, seq.n + 1):
                current = candidate_set_update(current, t, labels)
                assert not (current & labels.negative_region)
                if t not in labels.negative_region:
                    assert current
            _, state = dp_solve(seq, labels, 1.0)
            assert set(state.candidates) == current

    def test_cost_self_consistency(self):
        rng = np.random.default_rng(404)
        for _ in range(30):
            seq, labels = random_instance(rng, n_hi=40, m_max=3)
            for lam in (0.0, 2.5, 25.0):
                seg = lopart(seq, labels, lam)
                recomputed = objective_value(seq, seg.changepoints, lam)
                assert seg.cost == pytest.approx(recomputed, rel=1e-9, abs=1e-9)
                assert len(seg.means) == len(seg.changepoints) + 1

    def test_dp_state_costs_finite_and_last_choice_admissible(self):
        rng = np.random.default_rng(505)
        for _ in range(20):
            seq, labels = random_instance(rng, n_hi=30, m_max=3)
            seg, state = dp_solve(seq, labels, 1.0)
            processed = [
                t
                for t in range(1, seq.n + 1)
                if t not in labels.negative_region
            ]
            assert np.all(np.isfinite(state.W[processed]))
            assert int(state.tau_star[seq.n]) in {0, *state.candidates}
            last = int(state.tau_star[seq.n])
            if seg.changepoints:
                assert seg.changepoints[-1] == last
            # Final-segment mean recorded during the recursion.
            assert state.mean_at[seq.n] == pytest.approx(
                segment_mean(seq, last + 1, seq.n), rel=1e-12
            )

    def test_unconstrained_costs_non_decreasing(self):
        rng = np.random.default_rng(606)
        for _ in range(10):
            seq, _ = random_instance(rng, n_hi=40, m_max=0)
            _, state = dp_solve(seq, validate_labels([], seq.n), 3.0)
            diffs = np.diff(state.W)
            assert np.all(diffs >= -1e-12)

    def test_opart_changepoint_count_monotone_in_penalty(self):
        from lopart import PENALTY_GRID

        rng = np.random.default_rng(707)
        for _ in range(5):
            seq, _ = random_instance(rng, n_lo=20, n_hi=40, m_max=0)
            counts = [len(opart(seq, lam).changepoints) for lam in PENALTY_GRID]
            assert all(a >= b for a, b in zip(counts, counts[1:]))
