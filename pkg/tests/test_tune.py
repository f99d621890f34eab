"""Racing tuner tests: determinism, budget accounting, elimination rules."""

import math

import numpy as np
import pytest

from kronlow.discrepancy import star_discrepancy_exact
from kronlow.pointset import GOLDEN_RATIO, kronecker_with_unit_first
from kronlow.tune import (
    IntervalStudyResult,
    TuningScenario,
    evaluate_config_over_interval,
    interval_study,
    race_tune,
)


def quadratic_objective(params, n):
    # cheap synthetic landscape with a size-independent optimum at (0.3, 0.7)
    return float((params[0] - 0.3) ** 2 + (params[1] - 0.7) ** 2 + 0.001 * (n % 7))


class TestScenario:
    def test_interval_validated(self):
        with pytest.raises(ValueError):
            TuningScenario(n_lo=3, n_hi=100, budget_pairs=500)
        with pytest.raises(ValueError):
            TuningScenario(n_lo=50, n_hi=20, budget_pairs=500)

    def test_budget_floor(self):
        with pytest.raises(ValueError):
            TuningScenario(n_lo=5, n_hi=100, budget_pairs=30, elites=4)

    def test_alpha_validated(self):
        with pytest.raises(ValueError):
            TuningScenario(n_lo=5, n_hi=100, budget_pairs=500, elim_alpha=1.5)


class TestRaceTune:
    def test_deterministic(self):
        sc = TuningScenario(n_lo=5, n_hi=60, budget_pairs=300, seed=4)
        a = race_tune(sc, objective=quadratic_objective)
        b = race_tune(sc, objective=quadratic_objective)
        assert np.array_equal(a.params, b.params)
        assert a.per_instance_values == b.per_instance_values
        assert a.mean_rank == b.mean_rank
        assert a.evals_used == b.evals_used

    def test_budget_accounting_exact(self):
        calls = []

        def counting(params, n):
            calls.append((tuple(params), n))
            return quadratic_objective(params, n)

        sc = TuningScenario(n_lo=5, n_hi=60, budget_pairs=250, seed=1)
        tuned = race_tune(sc, objective=counting)
        assert tuned.evals_used == len(calls)
        assert tuned.evals_used <= sc.budget_pairs
        # the cache must make every charged evaluation unique
        assert len(set(calls)) == len(calls)

    def test_no_elimination_before_min_instances(self):
        sc = TuningScenario(n_lo=5, n_hi=60, budget_pairs=600, seed=2, min_instances=5)
        tuned = race_tune(sc, objective=quadratic_objective)
        assert all(e["after_instances"] >= 5 for e in tuned.audit["eliminations"])

    def test_converges_to_synthetic_optimum(self):
        sc = TuningScenario(n_lo=5, n_hi=60, budget_pairs=1500, seed=3)
        tuned = race_tune(sc, objective=quadratic_objective)
        assert np.linalg.norm(tuned.params - np.array([0.3, 0.7])) < 0.08

    def test_rank_invariance_under_monotone_rescaling(self):
        def rescaled(params, n):
            return math.exp(3.0 * quadratic_objective(params, n))

        sc = TuningScenario(n_lo=5, n_hi=60, budget_pairs=400, seed=5)
        a = race_tune(sc, objective=quadratic_objective)
        b = race_tune(sc, objective=rescaled)
        assert np.array_equal(a.params, b.params)

    def test_budget_too_small_for_one_round(self):
        sc = TuningScenario(n_lo=5, n_hi=60, budget_pairs=10, seed=0, elites=1)
        with pytest.raises(ValueError, match="cannot complete one round"):
            race_tune(sc, objective=quadratic_objective)

    def test_single_instance_degenerates_to_search(self):
        # one instance, real objective: the race reduces to best-value search
        # and must beat the published Sobol' value at n=100
        sc = TuningScenario(n_lo=100, n_hi=100, budget_pairs=300, seed=0, instances=[100])
        tuned = race_tune(sc)
        v100 = evaluate_config_over_interval(tuned.params, [100])[100]
        assert v100 <= 0.06057

    def test_per_instance_values_reevaluate_exactly(self):
        sc = TuningScenario(n_lo=5, n_hi=30, budget_pairs=120, seed=6, instances=4)
        tuned = race_tune(sc)
        for n, v in tuned.per_instance_values.items():
            again = star_discrepancy_exact(kronecker_with_unit_first(n, *tuned.params)).value
            assert again == v


class TestEvaluateOverInterval:
    def test_published_small_cell(self):
        values = evaluate_config_over_interval((0.5494, 0.7867), [20])
        assert values[20] == pytest.approx(0.15029, abs=2e-3)

    def test_single_point_set_value(self):
        # n=1 forces p1 = 1/1, the lone point lands on the x1 = 0 face
        values = evaluate_config_over_interval((GOLDEN_RATIO - 1.0, 0.37), [1])
        assert values[1] == 1.0

    def test_pure_function(self):
        a = evaluate_config_over_interval((0.3, 0.6), [5, 10])
        b = evaluate_config_over_interval((0.3, 0.6), [5, 10])
        assert a == b


class TestIntervalStudy:
    def test_structure_and_baseline(self):
        template = TuningScenario(n_lo=5, n_hi=9, budget_pairs=120, seed=0, instances=3)
        intervals = [(5, 20), (21, 40)]
        study = interval_study(intervals, template, probes_per_interval=3)
        assert isinstance(study, IntervalStudyResult)
        assert len(study.configs) == 2
        # (2 tuned configs + 1 random baseline) x 2 intervals x 3 probes
        assert len(study.matrix) == 3 * 2 * 3
        labels = {r["config"] for r in study.matrix}
        assert "random_baseline" in labels and len(labels) == 3
        rows = study.matrix_csv_rows()
        assert rows[0] == ["config", "trained_interval", "probe_interval", "n", "value"]

    def test_tuned_beats_random_inside_own_interval(self):
        template = TuningScenario(n_lo=5, n_hi=9, budget_pairs=400, seed=1, instances=4)
        study = interval_study([(5, 30)], template, probes_per_interval=5)
        own = [r["value"] for r in study.matrix if r["config"] != "random_baseline"]
        base = [r["value"] for r in study.matrix if r["config"] == "random_baseline"]
        mean_rank_tuned = np.mean([1 if a < b else 2 for a, b in zip(own, base)])
        mean_rank_base = np.mean([2 if a < b else 1 for a, b in zip(own, base)])
        assert mean_rank_tuned <= mean_rank_base

    def test_overlapping_intervals_rejected(self):
        template = TuningScenario(n_lo=5, n_hi=9, budget_pairs=120, seed=0)
        with pytest.raises(ValueError, match="overlap"):
            interval_study([(5, 20), (15, 40)], template)

    def test_matrix_figure_rendered(self, tmp_path):
        from kronlow.plots import plot_interval_matrix

        template = TuningScenario(n_lo=5, n_hi=9, budget_pairs=120, seed=0, instances=3)
        study = interval_study([(5, 12)], template, probes_per_interval=2)
        out = plot_interval_matrix(study.matrix, tmp_path / "matrix.png")
        assert out.exists() and out.stat().st_size > 0
