"""Tests for rank distribution matrices and order bias."""
import warnings

import numpy as np
import pytest

from src.bias import (
    dominance_violations,
    estimate_matrix,
    last_agent_distribution,
    order_bias,
    order_bias_report,
    rows_dominate,
    sd_exact_matrix,
    sd_rank_probability,
)
from src.limits import order_bias_limit
from src.mechanisms.oracle import brute_force_distribution
from src.models.mechanism import Mechanism
from src.models.rank_distribution import Provenance, RankDistribution
from src.models.scoring_rule import ScoringRule
from src.utils.config import config
from src.utils.errors import BadIndex, DegenerateRule, EmptyInstance


# =========================================================================
# EXACT SERIAL DICTATORSHIP MATRIX
# =========================================================================

class TestSerialDictatorshipMatrix:
    @pytest.mark.parametrize("n", [1, 10, 500])
    def test_rows_sum_to_one(self, n):
        D = sd_exact_matrix(n)
        assert D.provenance == Provenance.EXACT
        assert np.allclose(D.row_sums(), 1.0, atol=1e-9)

    def test_edges(self):
        n = 12
        assert sd_rank_probability(n, 1, 1) == pytest.approx(1.0)
        for s in range(1, n + 1):
            # the last agent receives a uniformly random item
            assert sd_rank_probability(n, n, s) == pytest.approx(1.0 / n)
        assert sd_rank_probability(n, 3, 4) == 0.0

    def test_matches_brute_force(self):
        exact = sd_exact_matrix(5).probabilities
        assert np.allclose(exact, brute_force_distribution(Mechanism.SD, 5).probabilities, atol=1e-12)

    def test_bad_arguments(self):
        with pytest.raises(EmptyInstance):
            sd_exact_matrix(0)
        with pytest.raises(BadIndex):
            sd_rank_probability(5, 6, 1)


# =========================================================================
# ORDER BIAS
# =========================================================================

class TestOrderBias:
    @pytest.mark.parametrize("k", [1, 3, 9])
    def test_serial_dictatorship_k_approval(self, k):
        n = 10
        assert order_bias(sd_exact_matrix(n), ScoringRule.k_approval(k)) == pytest.approx(1.0 - k / n)

    def test_serial_dictatorship_borda(self):
        for n in (2, 10, 100):
            assert order_bias(sd_exact_matrix(n), ScoringRule.borda()) == pytest.approx(0.5)

    def test_forms_agree_on_exact_matrix(self):
        report = order_bias_report(sd_exact_matrix(20), ScoringRule.k_approval(2))
        assert report.extreme_form == pytest.approx(report.max_form)
        assert not report.disagreement
        assert report.interval is None
        assert report.std_error == 0.0

    def test_degenerate_rules(self):
        with pytest.raises(DegenerateRule):
            order_bias(sd_exact_matrix(1), ScoringRule.borda())
        with pytest.raises(DegenerateRule):
            order_bias(sd_exact_matrix(4), ScoringRule.k_approval(4))

    def test_estimate_near_limit(self):
        n, trials = 200, 2000
        D = estimate_matrix(Mechanism.NB, n, trials, rng=12, positions=[1, n])
        report = order_bias_report(D, ScoringRule.k_approval(1))
        assert report.std_error > 0.0
        assert abs(report.max_form - report.extreme_form) < 1e-12
        assert report.max_form == pytest.approx(
            order_bias_limit(Mechanism.NB, ScoringRule.k_approval(1)), abs=0.05
        )

    def test_truncated_ranks_give_an_interval(self):
        D = estimate_matrix(Mechanism.NB, 50, 500, rng=4, positions=[1, 50], s_max=2)
        assert D.overflow[-1] > 0.0
        report = order_bias_report(D, ScoringRule.borda())
        assert report.interval is not None
        low, high = report.interval
        assert low <= high


# =========================================================================
# STOCHASTIC DOMINANCE
# =========================================================================

class TestDominance:
    def test_exact_matrices_dominate(self, mechanism):
        assert rows_dominate(brute_force_distribution(mechanism, 5))
        assert not dominance_violations(brute_force_distribution(mechanism, 4))

    def test_serial_dictatorship_large(self):
        assert rows_dominate(sd_exact_matrix(60))

    def test_estimated_extremes(self, mechanism):
        D = estimate_matrix(mechanism, 40, 1000, rng=6, positions=[1, 40])
        assert dominance_violations(D) == []

    def test_detects_violation(self):
        D = RankDistribution(
            n=2,
            mechanism=Mechanism.NB,
            provenance=Provenance.ESTIMATED,
            positions=[1, 2],
            probabilities=[[0.2, 0.8], [0.9, 0.1]],
            trials=10_000,
        )
        assert dominance_violations(D) == [(1, 1)]
        assert not rows_dominate(D)

    def test_rows_summing_past_one_by_rounding(self):
        # the first row's cumulative sum ends at 1.0000000000000002
        D = RankDistribution(
            n=4,
            mechanism=Mechanism.AB,
            provenance=Provenance.ESTIMATED,
            positions=[1, 2],
            probabilities=[[0.05, 0.55, 0.3, 0.1], [0.9, 0.05, 0.03, 0.02]],
            trials=10_000,
        )
        assert D.cumulative()[0, -1] > 1.0
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            assert dominance_violations(D) == [(1, 1), (1, 2), (1, 3)]


# =========================================================================
# ESTIMATED MATRICES
# =========================================================================

class TestEstimateMatrix:
    def test_shape_and_provenance(self, mechanism):
        D = estimate_matrix(mechanism, 30, 200, rng=2, s_max=5)
        assert D.positions == list(range(1, 31))
        assert D.width == 5
        assert D.trials == 200
        assert D.seed == 2
        assert np.allclose(D.row_sums(), 1.0)
        assert D.cell(1, 1) == 1.0
        assert np.isnan(D.cell(1, 6))

    def test_reproducible(self):
        first = estimate_matrix(Mechanism.AB, 25, 100, rng=3)
        second = estimate_matrix(Mechanism.AB, 25, 100, rng=3)
        assert np.array_equal(first.probabilities, second.probabilities)

    def test_last_agent(self):
        row = last_agent_distribution(Mechanism.SD, 20, 400, rng=1, s_max=20)
        assert row.shape == (20,)
        assert row.sum() == pytest.approx(1.0)

    def test_standard_errors(self):
        D = estimate_matrix(Mechanism.NB, 10, 100, rng=5)
        assert D.standard_errors().shape == D.probabilities.shape
        assert not sd_exact_matrix(10).standard_errors().any()

    def test_trials_must_be_positive(self):
        with pytest.raises(ValueError):
            estimate_matrix(Mechanism.NB, 10, 0)

    def test_default_width_follows_configured_truncation(self, monkeypatch):
        assert estimate_matrix(Mechanism.NB, 12, 20, rng=5).width == 12
        monkeypatch.setattr(config, "s_max", 4)
        D = estimate_matrix(Mechanism.NB, 40, 50, rng=5)
        assert D.width == 4
        assert D.probabilities.shape == (40, 4)
        assert np.allclose(D.row_sums(), 1.0)
        assert D.overflow[-1] > 0.0


class TestRankDistributionModel:
    def test_round_trip(self, tmp_path):
        D = sd_exact_matrix(6)
        D.save(tmp_path / "sd.json")
        loaded = RankDistribution.load(tmp_path / "sd.json")
        assert np.allclose(loaded.probabilities, D.probabilities)
        assert loaded.is_full

    @pytest.mark.parametrize("positions,probabilities", [
        ([2, 1], [[1.0, 0.0], [0.0, 1.0]]),
        ([1], [[0.5, 0.25, 0.25]]),
        ([1, 2], [[1.0, 0.0]]),
    ])
    def test_shape_validation(self, positions, probabilities):
        with pytest.raises(ValueError):
            RankDistribution(
                n=2, mechanism=Mechanism.SD, provenance=Provenance.EXACT,
                positions=positions, probabilities=probabilities,
            )

    def test_missing_row(self):
        with pytest.raises(KeyError):
            sd_exact_matrix(3).row(4)
