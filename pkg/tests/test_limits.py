"""Tests for the limiting recursions and the quantities built on them."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from src.limits import (
    ab_group_limits,
    ab_individual_limits,
    adaptive_limits,
    cumulative_q,
    cumulative_q_vector,
    expected_first_claims,
    group_limits,
    naive_limits,
    nb_group_limits,
    omega,
    omega_bounds,
    order_bias_limit,
    q_s_ab,
    q_s_nb,
    q_s_sd,
    q_vector,
    sd_group_limits,
    survivor_fraction,
    survivor_share_beyond,
    tail_bound,
    tail_mass,
    unmatched_after,
    welfare_limit_kapproval,
    z_bounds,
)
from src.limits.adaptive import MAX_ADAPTIVE_ROUND
from src.mechanisms import run_with_trace
from src.models.mechanism import Mechanism, RngSpec
from src.models.scoring_rule import ScoringRule
from src.utils.errors import BadIndex, BadTheta, NoLimitRule

INV_E = math.exp(-1.0)

# k-approval welfare W(1)/n and order bias, k = 1, 2, 3
WELFARE_TABLE = {
    Mechanism.NB: [0.632, 0.745, 0.803],
    Mechanism.AB: [0.632, 0.718, 0.776],
    Mechanism.SD: [0.5, 0.667, 0.75],
}
BIAS_TABLE = {
    Mechanism.NB: [0.632, 0.471, 0.378],
    Mechanism.AB: [0.632, 0.547, 0.485],
    Mechanism.SD: [1.0, 1.0, 1.0],
}

thetas = st.floats(min_value=0.01, max_value=1.0)


# =========================================================================
# OMEGA
# =========================================================================

class TestOmega:
    def test_first_values(self):
        assert omega(1) == 1.0
        assert omega(2) == pytest.approx(INV_E, abs=1e-15)
        assert omega(3) == pytest.approx(INV_E * math.exp(-INV_E), abs=1e-15)
        assert omega(5) == pytest.approx(0.1620, abs=1e-4)

    def test_decreasing(self):
        values = [omega(r) for r in range(1, 200)]
        assert all(b < a for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("r", [3, 4, 10, 100, 1000])
    def test_strict_bounds(self, r):
        low, high = omega_bounds(r)
        assert low < omega(r) < high

    def test_bad_index(self):
        with pytest.raises(BadIndex):
            omega(0)
        with pytest.raises(BadIndex):
            omega_bounds(0)


# =========================================================================
# NAIVE BOSTON RECURSION
# =========================================================================

class TestNaiveLimits:
    @pytest.mark.parametrize("theta", [0.25, 0.5, 1.0])
    def test_second_round_closed_form(self, theta):
        state = naive_limits(theta, 3)
        assert state.z_at(1) == theta
        assert state.z_prime_at(1) == 1.0
        assert state.f_at(1) == pytest.approx(1.0 - math.exp(-theta), abs=1e-15)
        assert state.z_at(2) == pytest.approx(theta + math.exp(-theta) - 1.0, abs=1e-15)
        assert state.z_prime_at(2) == pytest.approx(1.0 - math.exp(-theta), abs=1e-15)

    def test_whole_population_follows_omega(self):
        state = naive_limits(1.0, 10)
        assert np.allclose(state.z, [omega(r) for r in range(1, 11)], atol=1e-15)

    def test_theta_zero(self):
        state = naive_limits(0.0, 5)
        assert np.all(state.z == 0.0)
        assert state.z_prime_at(2) == 0.0

    @pytest.mark.parametrize("r", [1, 2, 3, 5])
    @pytest.mark.parametrize("theta", [0.3, 1.0])
    def test_z_is_integral_of_z_prime(self, r, theta):
        integral, _ = quad(lambda phi: naive_limits(phi, r).z_prime_at(r), 0.0, theta, epsabs=1e-12)
        assert integral == pytest.approx(naive_limits(theta, r).z_at(r), abs=1e-8)

    @given(theta=thetas, r=st.integers(2, 40))
    @settings(max_examples=200)
    def test_z_bounds(self, theta, r):
        state = naive_limits(theta, r)
        bounds = z_bounds(theta, r)
        assert bounds.z_prime_lower <= state.z_prime_at(r) * (1 + 1e-9)
        assert state.z_prime_at(r) <= bounds.z_prime_upper * (1 + 1e-9)
        assert bounds.z_lower <= state.z_at(r) * (1 + 1e-9) + 1e-300
        assert state.z_at(r) <= bounds.z_upper * (1 + 1e-9) + 1e-300

    @given(theta=thetas)
    @settings(max_examples=100)
    def test_nonincreasing_in_round(self, theta):
        state = naive_limits(theta, 30)
        assert np.all(np.diff(state.z) <= 0.0)
        assert np.all(np.diff(state.z_prime) <= 0.0)

    def test_nondecreasing_in_theta(self):
        states = [naive_limits(t, 12) for t in np.linspace(0.0, 1.0, 51)]
        z = np.array([s.z for s in states])  # (theta, round)
        z_prime = np.array([s.z_prime for s in states])
        assert np.all(np.diff(z, axis=0) >= -1e-15)
        assert np.all(np.diff(z_prime, axis=0) >= -1e-15)

    def test_bad_arguments(self):
        with pytest.raises(BadTheta):
            naive_limits(1.5, 3)
        with pytest.raises(BadIndex):
            naive_limits(0.5, 0)
        with pytest.raises(BadIndex):
            z_bounds(0.5, 1)


# =========================================================================
# ADAPTIVE BOSTON RECURSION
# =========================================================================

class TestAdaptiveLimits:
    def test_whole_population(self):
        state = adaptive_limits(1.0, 30)
        r = np.arange(1, 31)
        assert np.allclose(state.y, np.exp(1.0 - r), rtol=1e-12)
        assert np.allclose(state.y_prime, (1.0 - INV_E) ** (r - 1), rtol=1e-12)
        assert np.allclose(state.g, 1.0 - INV_E, rtol=1e-12)

    @pytest.mark.parametrize("theta", [0.25, 0.5, 0.9])
    def test_second_round_closed_form(self, theta):
        state = adaptive_limits(theta, 2)
        assert state.y_at(2) == pytest.approx(theta + math.exp(-theta) - 1.0, abs=1e-15)
        assert state.g_at(1) == pytest.approx(1.0 - math.exp(-theta), abs=1e-15)

    def test_small_theta_stays_positive(self):
        state = adaptive_limits(1e-4, 6)
        assert np.all(state.y > 0.0)
        assert np.all(np.diff(state.y) < 0.0)

    @pytest.mark.parametrize("r", [1, 2, 4])
    @pytest.mark.parametrize("theta", [0.4, 1.0])
    def test_y_is_integral_of_y_prime(self, r, theta):
        integral, _ = quad(lambda phi: adaptive_limits(phi, r).y_prime_at(r), 0.0, theta, epsabs=1e-12)
        assert integral == pytest.approx(adaptive_limits(theta, r).y_at(r), abs=1e-8)

    @given(theta=thetas)
    @settings(max_examples=100)
    def test_nonincreasing_in_round(self, theta):
        state = adaptive_limits(theta, 30)
        assert np.all(np.diff(state.y) <= 0.0)
        assert np.all(np.diff(state.y_prime) <= 0.0)

    def test_nondecreasing_in_theta(self):
        states = [adaptive_limits(t, 12) for t in np.linspace(0.0, 1.0, 51)]
        y = np.array([s.y for s in states])
        y_prime = np.array([s.y_prime for s in states])
        assert np.all(np.diff(y, axis=0) >= -1e-15)
        assert np.all(np.diff(y_prime, axis=0) >= -1e-15)

    def test_round_cap(self):
        adaptive_limits(0.5, MAX_ADAPTIVE_ROUND)
        with pytest.raises(BadIndex):
            adaptive_limits(0.5, MAX_ADAPTIVE_ROUND + 1)


# =========================================================================
# RANK DISTRIBUTIONS q_s
# =========================================================================

class TestQVector:
    @pytest.mark.parametrize("theta", [0.0, 0.3, 0.8, 1.0])
    def test_serial_dictatorship_closed_form(self, theta):
        q = q_vector(Mechanism.SD, theta, 10)
        assert np.allclose(q, [theta ** (s - 1) * (1 - theta) for s in range(1, 11)])
        assert q_s_sd(3, theta) == pytest.approx(q[2])

    @pytest.mark.parametrize("theta", [0.2, 1.0])
    def test_naive_is_difference_of_presence(self, theta):
        state = naive_limits(theta, 9)
        q = q_vector(Mechanism.NB, theta, 8)
        assert np.allclose(q, state.z_prime[:-1] - state.z_prime[1:], atol=1e-15)
        assert q_s_nb(4, theta) == pytest.approx(q[3])

    @pytest.mark.parametrize("s", range(1, 11))
    def test_naive_last_agent_through_omega(self, s):
        # z_s(1) = omega_s, so q_s(1) = z'_s(1) omega_s exp(-omega_s)
        state = naive_limits(1.0, s + 1)
        w = omega(s)
        assert q_s_nb(s, 1.0) == pytest.approx(state.z_prime_at(s) * w * math.exp(-w), rel=1e-12)
        assert q_s_nb(s, 1.0) == pytest.approx(
            state.z_prime_at(s) - state.z_prime_at(s + 1), rel=1e-9
        )

    def test_first_position_gets_first_choice(self, mechanism):
        q = q_vector(mechanism, 0.0, 5)
        assert q[0] == pytest.approx(1.0)
        assert q[1:].sum() == pytest.approx(0.0)

    def test_adaptive_first_rank(self):
        assert q_s_ab(1, 0.6) == pytest.approx(math.exp(-0.6), abs=1e-14)

    @pytest.mark.parametrize("theta", [0.2, 0.7, 1.0])
    def test_tail_bound_matches_missing_mass(self, mechanism, theta):
        assert tail_mass(mechanism, theta, 60) == pytest.approx(
            tail_bound(mechanism, theta, 60), abs=1e-10
        )

    @given(theta=thetas, mechanism=st.sampled_from(list(Mechanism)))
    @settings(max_examples=60, deadline=None)
    def test_nonnegative_and_subprobability(self, theta, mechanism):
        q = q_vector(mechanism, theta, 40)
        assert np.all(q >= -1e-15)
        assert q.sum() <= 1.0 + 1e-12

    def test_bad_rank(self):
        with pytest.raises(BadIndex):
            q_s_nb(0, 0.5)


# =========================================================================
# INTEGRALS
# =========================================================================

class TestCumulativeQ:
    @pytest.mark.parametrize("s", [1, 2, 5])
    def test_serial_dictatorship(self, s):
        theta = 0.7
        assert cumulative_q(Mechanism.SD, s, theta) == pytest.approx(
            theta ** s / s - theta ** (s + 1) / (s + 1), abs=1e-10
        )

    def test_adaptive_first_rank(self):
        assert cumulative_q(Mechanism.AB, 1, 0.5) == pytest.approx(1.0 - math.exp(-0.5), abs=1e-9)

    def test_naive_total_mass(self):
        theta = 0.8
        total = cumulative_q_vector(Mechanism.NB, theta, 10).sum()
        assert total == pytest.approx(theta - naive_limits(theta, 11).z_at(11), abs=1e-8)

    def test_vector_matches_scalar(self, mechanism):
        vector = cumulative_q_vector(mechanism, 0.9, 4)
        scalar = [cumulative_q(mechanism, s, 0.9) for s in range(1, 5)]
        assert np.allclose(vector, scalar, atol=1e-8)

    def test_zero_theta(self, mechanism):
        assert cumulative_q(mechanism, 2, 0.0) == 0.0
        assert not cumulative_q_vector(mechanism, 0.0, 3).any()


# =========================================================================
# WELFARE AND ORDER BIAS LIMITS
# =========================================================================

class TestClosedFormLimits:
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_welfare_table(self, mechanism, k):
        assert welfare_limit_kapproval(mechanism, k) == pytest.approx(
            WELFARE_TABLE[mechanism][k - 1], abs=5e-4
        )

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_bias_table(self, mechanism, k):
        assert order_bias_limit(mechanism, ScoringRule.k_approval(k)) == pytest.approx(
            BIAS_TABLE[mechanism][k - 1], abs=5e-4
        )

    def test_borda_bias(self):
        borda = ScoringRule.borda()
        assert order_bias_limit(Mechanism.SD, borda) == 0.5
        assert order_bias_limit(Mechanism.NB, borda) == 0.0
        assert order_bias_limit(Mechanism.AB, borda) == 0.0

    @pytest.mark.parametrize("k", [1, 3, 6])
    def test_welfare_is_integrated_q(self, mechanism, k):
        integrated = sum(cumulative_q(mechanism, s, 1.0) for s in range(1, k + 1))
        assert welfare_limit_kapproval(mechanism, k) == pytest.approx(integrated, abs=1e-8)

    @pytest.mark.parametrize("k", [1, 4])
    def test_bias_is_last_agent_shortfall(self, k):
        for mechanism in (Mechanism.NB, Mechanism.AB):
            shortfall = 1.0 - q_vector(mechanism, 1.0, k).sum()
            assert order_bias_limit(mechanism, ScoringRule.k_approval(k)) == pytest.approx(
                shortfall, abs=1e-12
            )

    def test_welfare_ordering(self):
        for k in (1, 2, 3):
            nb = welfare_limit_kapproval(Mechanism.NB, k)
            ab = welfare_limit_kapproval(Mechanism.AB, k)
            sd = welfare_limit_kapproval(Mechanism.SD, k)
            assert nb >= ab >= sd

    def test_custom_rule_has_no_bias_limit(self):
        with pytest.raises(NoLimitRule):
            order_bias_limit(Mechanism.NB, ScoringRule.custom([1.0, 0.5, 0.0]))

    def test_bad_k(self):
        with pytest.raises(BadIndex):
            welfare_limit_kapproval(Mechanism.NB, 0)


# =========================================================================
# SURVIVORS AND PER-ROUND GROUP LIMITS
# =========================================================================

class TestSurvivors:
    def test_unmatched_after_four_rounds(self):
        assert unmatched_after(Mechanism.AB, 4) == pytest.approx(math.exp(-4.0), rel=1e-12)
        assert unmatched_after(Mechanism.NB, 4) == pytest.approx(omega(5), rel=1e-12)
        assert unmatched_after(Mechanism.NB, 4) == pytest.approx(0.162, abs=1e-3)
        assert unmatched_after(Mechanism.SD, 1) == 0.0
        assert unmatched_after(Mechanism.SD, 0) == 1.0

    def test_late_survivors_sit_at_the_back(self):
        share = survivor_share_beyond(Mechanism.AB, 5, 0.9)
        assert 0.6 <= share <= 0.7

    def test_no_survivors(self):
        with pytest.raises(BadIndex):
            survivor_share_beyond(Mechanism.SD, 2, 0.5)

    def test_survivor_fraction_monotone_in_theta(self, mechanism):
        values = [survivor_fraction(mechanism, 2, t) for t in np.linspace(0, 1, 11)]
        assert all(b >= a for a, b in zip(values, values[1:]))


class TestGroupLimits:
    @pytest.mark.parametrize("r", [1, 2, 3])
    def test_adaptive_bids_cover_population(self, r):
        theta = 0.6
        state = adaptive_limits(theta, r + 1)
        cells = [ab_group_limits(theta, r, s) for s in range(r, 201)]
        assert sum(c.bids for c in cells) == pytest.approx(state.y_at(r), abs=1e-9)
        assert sum(c.successful for c in cells) == pytest.approx(
            state.y_at(r) - state.y_at(r + 1), abs=1e-9
        )
        assert all(c.bids == pytest.approx(c.successful + c.unsuccessful) for c in cells)

    def test_adaptive_individual(self):
        total = sum(ab_individual_limits(1.0, 2, s).bid for s in range(2, 201))
        present = ab_individual_limits(1.0, 2, 2).present
        assert present == pytest.approx(1.0 - INV_E)
        assert total == pytest.approx(present, abs=1e-12)
        u22 = INV_E
        assert ab_individual_limits(1.0, 2, 2).matched == pytest.approx(present * u22 * INV_E)

    def test_naive_only_diagonal(self):
        state = naive_limits(0.5, 3)
        cell = nb_group_limits(0.5, 2, 2)
        assert cell == pytest.approx((state.z_at(2), state.z_at(3), state.z_at(2) - state.z_at(3)))
        assert nb_group_limits(0.5, 2, 3) == (0.0, 0.0, 0.0)

    def test_serial_dictatorship_round_one(self):
        won = sum(sd_group_limits(0.5, 1, s).successful for s in range(1, 80))
        assert won == pytest.approx(0.5, abs=1e-12)
        assert sd_group_limits(0.5, 2, 1) == (0.0, 0.0, 0.0)

    def test_dispatch(self, mechanism):
        assert group_limits(mechanism, 0.5, 1, 1) == (
            {Mechanism.NB: nb_group_limits, Mechanism.AB: ab_group_limits,
             Mechanism.SD: sd_group_limits}[mechanism](0.5, 1, 1)
        )


# =========================================================================
# FIRST CLAIMS IN ONE ROUND
# =========================================================================

def simulate_first_claims(m, members, blue, reps, seed):
    rng = np.random.default_rng(seed)
    last = max(members)
    picks = rng.integers(0, m, size=(reps, last))
    seen = np.zeros((reps, m), dtype=bool)
    counts = np.zeros(reps, dtype=np.int64)
    rows = np.arange(reps)
    for a in range(1, last + 1):
        item = picks[:, a - 1]
        fresh = ~seen[rows, item]
        if a in members:
            counts += fresh & (item < blue)
        seen[rows, item] = True
    return counts


class TestFirstClaims:
    def test_whole_population_closed_form(self):
        m = 20
        expected = m * (1.0 - (1.0 - 1.0 / m) ** m)
        assert expected_first_claims(m, range(1, m + 1)) == pytest.approx(expected)

    @pytest.mark.parametrize("members,blue", [(range(1, 21), 20), (range(5, 11), 8)])
    def test_matches_simulation_and_variance_bound(self, members, blue):
        m, reps = 20, 20_000
        members = set(members)
        counts = simulate_first_claims(m, members, blue, reps, seed=3)
        expected = expected_first_claims(m, members, blue)
        assert abs(counts.mean() - expected) < 4 * math.sqrt(expected / reps)
        assert counts.var(ddof=1) <= expected * 1.05

    def test_naive_boston_round_one_claims(self):
        # round-1 winners in a segment are exactly its first claims
        n, trials = 200, 400
        halves = {"first": range(1, 101), "all": range(1, 201)}
        claims = {key: [] for key in halves}
        for t in range(trials):
            _, trace = run_with_trace(Mechanism.NB, n, RngSpec(master_seed=31, trial_index=t), [0.5, 1.0])
            round_two = trace.remaining_by_theta[1] if trace.rounds > 1 else [0, 0]
            claims["first"].append(100 - round_two[0])
            claims["all"].append(n - round_two[1])
        for key, members in halves.items():
            counts = np.asarray(claims[key], dtype=float)
            expected = expected_first_claims(n, members)
            assert abs(counts.mean() - expected) < 4 * math.sqrt(expected / trials)
            assert counts.var(ddof=1) <= expected

    def test_bad_arguments(self):
        with pytest.raises(BadIndex):
            expected_first_claims(0, [1])
        with pytest.raises(BadIndex):
            expected_first_claims(5, [1], blue=6)
        with pytest.raises(BadIndex):
            expected_first_claims(5, [0])
