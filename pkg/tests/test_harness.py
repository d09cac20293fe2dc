"""Tests for the experiment harness."""

import math

import pytest

from dilution_gt.errors import BudgetExceededError, UsageError
from dilution_gt.harness import (
    COUNT_COLUMNS,
    GRID_COLUMNS,
    TRIAL_COLUMNS,
    ExperimentConfig,
    TrialRecord,
    grid_sweep,
    is_success,
    majority_failure_rate,
    run_experiment,
    run_trials,
    scaled_delta,
    sweep_test_counts,
    timing_sweep,
)
from dilution_gt.plan import ChernoffParams, chernoff_failure_bound


class TestExperimentConfig:
    def test_modes(self):
        assert ExperimentConfig(sweep="tests-d1").mode == "count-only"
        assert ExperimentConfig(sweep="tests-dmulti").mode == "count-only"
        assert ExperimentConfig(sweep="accuracy").mode == "full-sim"
        assert ExperimentConfig(sweep="timing").mode == "full-sim"

    def test_invalid(self):
        with pytest.raises(UsageError):
            ExperimentConfig(sweep="figures")
        with pytest.raises(UsageError):
            ExperimentConfig(trials=0)
        with pytest.raises(UsageError):
            ExperimentConfig(seed=-1)
        with pytest.raises(UsageError):
            ExperimentConfig(sweep="tests-d1", grid=True)

    def test_default_plans(self):
        assert ExperimentConfig(d=1).plan().n_items == 2**21
        plan = ExperimentConfig(d=3).plan()
        assert plan.rs == (128, 5, 3)
        assert plan.c == 401


class TestSuccess:
    def test_superset_and_exact(self):
        assert is_success((2, 7), (2, 5, 7))
        assert not is_success((2, 7), (2, 5, 7), strict=True)
        assert is_success((2, 7), (2, 7), strict=True)
        assert not is_success((2, 7), (7,))
        assert is_success((), ())

    def test_record_row(self):
        record = TrialRecord(3, (1, 4), (1, 4, 9), True, False, 0.5, 0.25)
        row = record.to_row()
        assert row["truth"] == "1 4"
        assert row["decoded"] == "1 4 9"
        assert row["success"] is True


class TestSweepTestCounts:
    """Arithmetic-only sweeps."""

    def test_d1_grid(self):
        rows = sweep_test_counts(ExperimentConfig(sweep="tests-d1"))
        assert len(rows) == 20
        high = [row for row in rows if (row["theta0"], row["theta1"]) == (0.2, 0.1)]
        assert max(row["K"] for row in high) == 15576
        assert all(row["K"] <= 16000 for row in rows)

    def test_noise_monotone(self):
        rows = sweep_test_counts(ExperimentConfig(sweep="tests-d1"))
        by_items = {}
        for row in rows:
            by_items.setdefault(row["n_items"], []).append(row["c"])
        for cs in by_items.values():
            assert cs == sorted(cs)

    def test_dmulti_grid(self):
        rows = sweep_test_counts(ExperimentConfig(sweep="tests-dmulti"))
        assert len(rows) == 30
        target = [
            row
            for row in rows
            if row["case"] == 5 and row["d"] == 16 and row["theta0"] == 0.2
        ]
        assert len(target) == 1
        assert target[0]["t"] == 2_099_294_208
        assert max(row["t"] for row in rows) <= 2.5e9

    def test_single_case(self):
        rows = sweep_test_counts(ExperimentConfig(sweep="tests-dmulti", case=1, d=3))
        assert len(rows) == 2
        assert rows[1]["c"] == 401
        assert rows[0]["c"] <= rows[1]["c"]
        assert all(row["n"] == 5 for row in rows)

    def test_not_a_count_sweep(self):
        with pytest.raises(UsageError):
            sweep_test_counts(ExperimentConfig(sweep="accuracy"))


class TestRunTrials:
    """Full simulations on desk-scale plans."""

    def test_noiseless_small_plan(self, small_plan):
        config = ExperimentConfig(theta0=0.0, theta1=0.0, d=3, trials=10, seed=1)
        records, summary = run_trials(config, plan=small_plan)
        assert [record.trial for record in records] == list(range(10))
        assert summary["success_rate"] == 1.0
        assert all(len(record.truth) == 3 for record in records)

    def test_reproducible(self, small_plan):
        config = ExperimentConfig(d=3, trials=4, seed=7)
        first, _ = run_trials(config, plan=small_plan)
        second, _ = run_trials(config, plan=small_plan)
        assert [(r.truth, r.decoded) for r in first] == [(r.truth, r.decoded) for r in second]

    def test_parallel_matches_serial(self, small_plan):
        serial, _ = run_trials(ExperimentConfig(d=3, trials=6, seed=3), plan=small_plan)
        parallel, _ = run_trials(ExperimentConfig(d=3, trials=6, seed=3, workers=3), plan=small_plan)
        assert [(r.truth, r.decoded) for r in serial] == [(r.truth, r.decoded) for r in parallel]

    def test_summary_recomputes(self, small_plan):
        records, summary = run_trials(ExperimentConfig(d=3, trials=8, seed=2), plan=small_plan)
        assert summary["success_rate"] == sum(r.success for r in records) / len(records)
        for record in records:
            assert record.success == is_success(record.truth, record.decoded)

    def test_pinned_defectives(self, small_plan):
        config = ExperimentConfig(d=3, trials=3, defectives=(2, 7, 11))
        records, _ = run_trials(config, plan=small_plan)
        assert all(record.truth == (2, 7, 11) for record in records)

    def test_progress_callback(self, small_plan):
        ticks = []
        run_trials(ExperimentConfig(d=3, trials=5), plan=small_plan, progress=ticks.append)
        assert sum(ticks) == 5

    def test_budget_refusal(self, small_plan):
        config = ExperimentConfig(d=3, trials=1, sim_budget=1000)
        with pytest.raises(BudgetExceededError) as excinfo:
            run_trials(config, plan=small_plan)
        assert excinfo.value.required == small_plan.t
        assert "h*k*c" in str(excinfo.value)

    def test_single_defective_regime(self):
        """N = 2^10, delta = 0.01: 2000 trials fail at most 2% of the time."""
        config = ExperimentConfig(n_items=2**10, d=1, delta=0.01, trials=2000, seed=11)
        _, summary = run_trials(config)
        assert summary["c"] == 161
        assert 1.0 - summary["success_rate"] <= 0.02

    @pytest.mark.slow
    def test_case1_accuracy(self):
        """N = 2^21 and d = 6 with high noise: 100 trials, at most one miss."""
        config = ExperimentConfig(d=6, case=1, trials=100, seed=0, workers=4)
        _, summary = run_trials(config)
        assert summary["t"] == 1408 * 42 * 431
        assert summary["success_rate"] >= 0.99


class TestTiming:
    def test_scaled_delta_doubles_c(self):
        config = ExperimentConfig(n_items=2**10, d=1, delta=0.01)
        base = config.plan()
        doubled = config.plan(scaled_delta(base, 2))
        assert 2 * base.c - 2 <= doubled.c <= 2 * base.c + 1

    @pytest.mark.slow
    def test_decode_time_is_linear(self):
        config = ExperimentConfig(sweep="timing", d=3, case=1, trials=20, seed=0)
        rows = timing_sweep(config)
        assert len(rows) == 3
        for row in rows[1:]:
            assert 1.5 <= row["t_ratio"] <= 2.5
            assert 1.5 <= row["time_ratio"] <= 3.0


class TestMajorityFailureRate:
    def test_against_chernoff_bound(self):
        rate = majority_failure_rate(0.85, 235, 10**6, seed=0)
        bound = chernoff_failure_bound(235, ChernoffParams(), 0.85)
        assert rate <= 3 * bound

    def test_coin_flip(self):
        rate = majority_failure_rate(0.5, 1, 10**5, seed=1)
        assert math.isclose(rate, 0.5, abs_tol=0.01)

    def test_invalid(self):
        with pytest.raises(UsageError):
            majority_failure_rate(1.5, 3, 10)
        with pytest.raises(UsageError):
            majority_failure_rate(0.9, 0, 10)
        with pytest.raises(UsageError):
            majority_failure_rate(0.9, 3, 10, seed=-1)


class TestRunExperiment:
    def test_count_only(self):
        rows, columns, summary = run_experiment(ExperimentConfig(sweep="tests-d1"))
        assert columns == COUNT_COLUMNS
        assert summary["plans"] == 20
        assert summary["max_K"] == 15576

    def test_accuracy_rows(self):
        config = ExperimentConfig(n_items=2**10, d=1, delta=0.01, trials=4, seed=2)
        rows, columns, summary = run_experiment(config)
        assert columns == TRIAL_COLUMNS
        assert len(rows) == 4
        assert set(TRIAL_COLUMNS) <= set(rows[0])
        assert summary["trials"] == 4


class TestGridSweep:
    """Test cases for the preset case x d x noise grid."""

    def test_over_budget_points_are_sized(self):
        config = ExperimentConfig(grid=True, case=1, d=3, sim_budget=10**6, trials=1)
        rows = grid_sweep(config)
        assert [(row["theta0"], row["theta1"]) for row in rows] == [(0.002, 0.001), (0.2, 0.1)]
        for row in rows:
            assert row["case"] == 1
            assert row["d"] == 3
            assert row["t"] > 10**6
            assert row["simulated"] is False
            assert row["trials"] == 0
            assert math.isnan(row["success_rate"])

    def test_run_experiment_columns(self):
        config = ExperimentConfig(sweep="timing", grid=True, case=1, d=6, sim_budget=1000, trials=1)
        rows, columns, summary = run_experiment(config)
        assert columns == GRID_COLUMNS
        assert set(GRID_COLUMNS) <= set(rows[0])
        assert summary["points"] == 2
        assert summary["simulated"] == 0
        assert math.isnan(summary["min_success_rate"])

    def test_all_ds_when_unpinned(self):
        config = ExperimentConfig(grid=True, case=2, d=1, sim_budget=1, trials=1)
        rows = grid_sweep(config)
        assert sorted({row["d"] for row in rows}) == [3, 6, 16]
        assert len(rows) == 6

    @pytest.mark.slow
    def test_simulated_point(self):
        config = ExperimentConfig(
            grid=True, case=1, d=3, noise_grid=[(0.2, 0.1)], trials=1, seed=0
        )
        (row,) = grid_sweep(config)
        assert row["simulated"] is True
        assert row["t"] == 640 * 42 * 401
        assert (row["theta0"], row["theta1"]) == (0.2, 0.1)
        assert row["success_rate"] == 1.0
        assert row["decode_ns_per_outcome"] > 0
