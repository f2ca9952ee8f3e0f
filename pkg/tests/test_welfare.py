"""Tests for empirical and limiting welfare."""
import math

import numpy as np
import pytest

from src.limits import welfare_limit_kapproval
from src.mechanisms.engine import assign_from_profile
from src.mechanisms.trial_runner import TrialJob, TrialRunner
from src.models.mechanism import Mechanism
from src.models.scoring_rule import ScoringRule
from src.utils.errors import NoLimitRule
from src.welfare import (
    LimitWelfare,
    empirical_welfare_curve,
    welfare_limit_curve,
    welfare_median,
    welfare_of,
)

CONTESTED = [[0, 1, 2], [0, 1, 2], [1, 0, 2]]


class TestWelfareOf:
    def test_k_approval(self):
        a = assign_from_profile(Mechanism.SD, CONTESTED)  # ranks 1, 2, 3
        rule = ScoringRule.k_approval(1)
        assert welfare_of(a, rule, 1.0) == pytest.approx(1 / 3)
        assert welfare_of(a, rule, 1.0, raw=True) == 1.0
        assert welfare_of(a, ScoringRule.k_approval(2), 1.0, raw=True) == 2.0
        assert welfare_of(a, rule, 0.0) == 0.0

    def test_borda(self):
        a = assign_from_profile(Mechanism.SD, CONTESTED)
        assert welfare_of(a, ScoringRule.borda(), 1.0, raw=True) == pytest.approx(1.5)
        assert welfare_of(a, ScoringRule.borda(), 0.5, raw=True) == pytest.approx(1.0)


class TestLimitWelfare:
    def test_borda_counts_everyone(self, mechanism):
        limit = LimitWelfare(mechanism, ScoringRule.borda())
        for theta in (0.25, 0.6, 1.0):
            assert limit(theta) == pytest.approx(theta, abs=1e-8)

    def test_curve_end_matches_closed_form(self, mechanism):
        for k in (1, 2):
            curve = welfare_limit_curve(mechanism, ScoringRule.k_approval(k), [0.0, 0.5, 1.0])
            assert curve.source == "limit"
            assert curve.values[0] == 0.0
            assert curve.at(1.0) == pytest.approx(welfare_limit_kapproval(mechanism, k), abs=1e-8)
            assert curve.is_nondecreasing()

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_curve_is_concave(self, mechanism, k):
        grid = [float(t) for t in np.linspace(0.0, 1.0, 21)]
        values = welfare_limit_curve(mechanism, ScoringRule.k_approval(k), grid).values
        assert np.all(np.diff(values, 2) <= 1e-9)

    def test_default_grid(self):
        curve = welfare_limit_curve(Mechanism.NB, ScoringRule.k_approval(1))
        assert len(curve.theta_grid) == 21
        assert len(curve.tail_mass) == 21

    def test_custom_rule_with_limit_weights(self):
        rule = ScoringRule.custom([1.0, 0.5, 0.0], limit_weights=[1.0, 0.5, 0.0])
        # SD: integral of q_1 is 1/2, of q_2 is 1/6
        assert LimitWelfare(Mechanism.SD, rule)(1.0) == pytest.approx(0.5 + 0.5 / 6, abs=1e-8)

    def test_custom_rule_without_limit_weights(self):
        with pytest.raises(NoLimitRule):
            LimitWelfare(Mechanism.NB, ScoringRule.custom([1.0, 0.0]))


class TestWelfareMedian:
    def test_adaptive_one_approval(self):
        expected = -math.log(1.0 - (1.0 - math.exp(-1.0)) / 2.0)
        assert expected == pytest.approx(0.3799, abs=1e-4)
        assert welfare_median(Mechanism.AB, ScoringRule.k_approval(1)) == pytest.approx(
            expected, abs=1e-7
        )

    def test_serial_dictatorship_one_approval(self):
        assert welfare_median(Mechanism.SD, ScoringRule.k_approval(1)) == pytest.approx(
            1.0 - math.sqrt(0.5), abs=1e-7
        )

    def test_borda_median_is_half(self, mechanism):
        assert welfare_median(mechanism, ScoringRule.borda()) == pytest.approx(0.5, abs=1e-6)


class TestEmpiricalWelfare:
    def test_close_to_limit(self, mechanism):
        rule = ScoringRule.k_approval(2)
        grid = (0.5, 1.0)
        job = TrialJob(mechanism=mechanism, n=2000, master_seed=8, theta_grid=grid, rule=rule)
        results = TrialRunner(1).run(job, 20)
        empirical = empirical_welfare_curve(results, rule)
        limit = welfare_limit_curve(mechanism, rule, list(grid))
        assert empirical.source == "empirical"
        assert empirical.trials == 20
        assert empirical.is_nondecreasing()
        for got, want in zip(empirical.values, limit.values):
            assert got == pytest.approx(want, abs=0.02)

    def test_needs_rule(self):
        job = TrialJob(mechanism=Mechanism.SD, n=10, master_seed=1)
        results = TrialRunner(1).run(job, 2)
        with pytest.raises(ValueError):
            empirical_welfare_curve(results)

    def test_rule_mismatch(self):
        job = TrialJob(mechanism=Mechanism.SD, n=10, master_seed=1, rule=ScoringRule.borda())
        results = TrialRunner(1).run(job, 2)
        with pytest.raises(ValueError):
            empirical_welfare_curve(results, ScoringRule.k_approval(1))
