"""Limiting rank distributions q_s(theta) and everything built on them.

q_s(theta) is the limiting probability that the agent at relative position
theta obtains their s-th preference:

    NB  q_s = z'_s - z'_{s+1} = z'_s omega_s exp(-z_s)
    AB  q_s = sum_{r<=s} u_rs y'_r exp(-e^{r-1} y_r)
    SD  q_s = theta^{s-1} (1 - theta)
"""
import math
import warnings
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.integrate import IntegrationWarning, quad, quad_vec

from src.limits.adaptive import MAX_ADAPTIVE_ROUND, adaptive_limits, check_round
from src.limits.naive import check_theta, naive_limits
from src.limits.omega import omega
from src.limits.urn import u_table
from src.models.mechanism import Mechanism
from src.models.scoring_rule import ScoringRule
from src.utils.config import config
from src.utils.errors import BadIndex, NoLimitRule, QuadratureFailure
from src.utils.logger import setup_logger

logger = setup_logger("RankLimits")

INV_E = math.exp(-1.0)


def _check_rank(s: int) -> int:
    if s < 1:
        raise BadIndex(f"ranks start at 1, got s={s}")
    return s


# =========================================================================
# q_s(theta)
# =========================================================================

def _ab_weights(theta: float, rounds: int) -> np.ndarray:
    """y'_r exp(-x_r) for r = 1..rounds, zero past the supported depth."""
    depth = min(rounds, MAX_ADAPTIVE_ROUND)
    state = adaptive_limits(theta, depth)
    weights = np.zeros(rounds)
    weights[:depth] = state.y_prime * np.exp(-state.x)
    return weights


def q_vector(mechanism: Mechanism, theta: float, s_max: int) -> np.ndarray:
    """(q_1(theta), ..., q_{s_max}(theta)) for one mechanism."""
    theta = check_theta(theta)
    _check_rank(s_max)
    mechanism = Mechanism(mechanism)

    if mechanism == Mechanism.NB:
        state = naive_limits(theta, s_max)
        return state.z_prime * state.omega * np.exp(-state.z)
    if mechanism == Mechanism.AB:
        table = u_table(s_max)
        return _ab_weights(theta, s_max) @ table.values
    s = np.arange(s_max)
    return theta ** s * (1.0 - theta)


def q_s_nb(s: int, theta: float) -> float:
    return float(q_vector(Mechanism.NB, theta, _check_rank(s))[s - 1])


def q_s_ab(s: int, theta: float) -> float:
    return float(q_vector(Mechanism.AB, theta, _check_rank(s))[s - 1])


def q_s_sd(s: int, theta: float) -> float:
    theta = check_theta(theta)
    return theta ** (_check_rank(s) - 1) * (1.0 - theta)


def tail_mass(mechanism: Mechanism, theta: float, s_max: int) -> float:
    """1 - sum_{s <= s_max} q_s(theta), as computed."""
    return float(1.0 - q_vector(mechanism, theta, s_max).sum())


def tail_bound(mechanism: Mechanism, theta: float, s_max: int) -> float:
    """
    Analytic mass beyond rank s_max:
    NB z'_{s_max+1}(theta); SD theta^{s_max}; AB the mass of agents still
    bidding after round s_max plus the u-table tails of earlier rounds.
    """
    theta = check_theta(theta)
    mechanism = Mechanism(mechanism)
    if mechanism == Mechanism.NB:
        return float(naive_limits(theta, s_max + 1).z_prime[-1])
    if mechanism == Mechanism.SD:
        return theta ** s_max
    weights = _ab_weights(theta, s_max)
    table = u_table(s_max)
    depth = min(s_max + 1, MAX_ADAPTIVE_ROUND)
    beyond = adaptive_limits(theta, depth).y_prime[-1] if depth == s_max + 1 else 0.0
    return float(weights @ table.tail_masses() + beyond)


# =========================================================================
# Integrals over theta
# =========================================================================

def _integrate(integrand: Callable[[float], float], theta: float, tol: float, label: str) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value, error = quad(integrand, 0.0, theta, epsabs=tol, epsrel=0.0, limit=200)
        except IntegrationWarning as e:
            raise QuadratureFailure(f"{label}: {e}") from e
    if error > tol:
        raise QuadratureFailure(f"{label}: error estimate {error:.2e} above tolerance {tol:.0e}")
    return value


def cumulative_q(mechanism: Mechanism, s: int, theta: float, quad_tol: Optional[float] = None) -> float:
    """
    integral_0^theta q_s(phi) d phi, the limiting fraction of all agents
    that lie in A(theta) and obtain rank s.
    """
    theta = check_theta(theta)
    _check_rank(s)
    mechanism = Mechanism(mechanism)
    tol = quad_tol or config.quad_tol
    if theta == 0.0:
        return 0.0

    scalar = {Mechanism.NB: q_s_nb, Mechanism.AB: q_s_ab, Mechanism.SD: q_s_sd}[mechanism]
    value = _integrate(lambda phi: scalar(s, phi), theta, tol, f"{mechanism.value} q_{s}")

    if mechanism == Mechanism.SD:
        closed = theta ** s / s - theta ** (s + 1) / (s + 1)
        if abs(value - closed) > 10 * tol:
            raise QuadratureFailure(
                f"sd q_{s}: quadrature {value!r} disagrees with closed form {closed!r}"
            )
    return value


def cumulative_q_vector(mechanism: Mechanism, theta: float, s_max: int,
                        quad_tol: Optional[float] = None) -> np.ndarray:
    """integral_0^theta q_s for s = 1..s_max, in one vector quadrature."""
    theta = check_theta(theta)
    _check_rank(s_max)
    tol = quad_tol or config.quad_tol
    if theta == 0.0:
        return np.zeros(s_max)

    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value, error, info = quad_vec(
                lambda phi: q_vector(mechanism, phi, s_max),
                0.0, theta, epsabs=tol, epsrel=0.0, norm="max", full_output=True,
            )
        except IntegrationWarning as e:
            raise QuadratureFailure(f"{Mechanism(mechanism).value} q-vector: {e}") from e
    if not info.success or error > tol:
        raise QuadratureFailure(
            f"{Mechanism(mechanism).value} q-vector at theta={theta}: "
            f"error {error:.2e}, status {info.status}"
        )
    return np.asarray(value)


# =========================================================================
# Closed-form welfare and order-bias limits
# =========================================================================

def welfare_limit_kapproval(mechanism: Mechanism, k: int) -> float:
    """Limiting W_n(1)/n under k-approval."""
    if k < 1:
        raise BadIndex(f"k must be >= 1, got {k}")
    mechanism = Mechanism(mechanism)
    if mechanism == Mechanism.NB:
        return 1.0 - omega(k + 1)
    if mechanism == Mechanism.SD:
        return k / (k + 1)
    values = u_table(k).values
    scale = np.exp(-np.arange(k, dtype=float))  # e^{1-r}
    return float((1.0 - INV_E) * (scale @ values).sum())


def order_bias_limit(mechanism: Mechanism, rule: ScoringRule) -> float:
    """Limit of the order bias as n grows, for k-approval and Borda."""
    mechanism = Mechanism(mechanism)
    if rule.kind == "borda":
        return 0.5 if mechanism == Mechanism.SD else 0.0
    if rule.kind != "k_approval":
        raise NoLimitRule(f"no order-bias limit for {rule.label} rules")

    k = rule.k
    if mechanism == Mechanism.SD:
        return 1.0
    if mechanism == Mechanism.NB:
        return float(naive_limits(1.0, k + 1).z_prime[-1])
    values = u_table(k).values
    survive = (1.0 - INV_E) ** np.arange(k, dtype=float)  # (1 - e^-1)^{r-1}
    return float(1.0 - INV_E * (survive @ values).sum())


# =========================================================================
# Per-round limits
# =========================================================================

class IndividualLimits(NamedTuple):
    """Limits for the single agent at relative position theta."""
    present: float   # P(present at round r)
    bid: float       # P(bids for rank s at round r)
    matched: float   # P(matched at round r with rank s)


class GroupLimits(NamedTuple):
    """Limits of counts over A(theta), divided by n."""
    bids: float
    unsuccessful: float
    successful: float


def ab_individual_limits(theta: float, r: int, s: int) -> IndividualLimits:
    theta = check_theta(theta)
    check_round(r)
    _check_rank(s)
    state = adaptive_limits(theta, r)
    u = u_table(max(r, s)).u(r, s)
    present = state.y_prime_at(r)
    return IndividualLimits(present, present * u, present * u * (1.0 - state.g_at(r)))


def ab_group_limits(theta: float, r: int, s: int) -> GroupLimits:
    theta = check_theta(theta)
    check_round(r)
    _check_rank(s)
    state = adaptive_limits(theta, min(r + 1, MAX_ADAPTIVE_ROUND))
    u = u_table(max(r, s)).u(r, s)
    y_r = state.y_at(r)
    y_next = state.y_at(r + 1) if r < MAX_ADAPTIVE_ROUND else 0.0
    return GroupLimits(u * y_r, u * y_next, u * (y_r - y_next))


def nb_group_limits(theta: float, r: int, s: int) -> GroupLimits:
    """Naive Boston agents bid for rank r in round r, so only s == r is nonzero."""
    theta = check_theta(theta)
    if r < 1:
        raise BadIndex(f"rounds are indexed from 1, got r={r}")
    _check_rank(s)
    if s != r:
        return GroupLimits(0.0, 0.0, 0.0)
    state = naive_limits(theta, r + 1)
    z_r, z_next = state.z_at(r), state.z_at(r + 1)
    return GroupLimits(z_r, z_next, z_r - z_next)


def sd_group_limits(theta: float, r: int, s: int) -> GroupLimits:
    """Serial Dictatorship settles everyone in round 1 with no failed bids."""
    theta = check_theta(theta)
    if r < 1:
        raise BadIndex(f"rounds are indexed from 1, got r={r}")
    _check_rank(s)
    if r != 1:
        return GroupLimits(0.0, 0.0, 0.0)
    share = theta ** s / s - theta ** (s + 1) / (s + 1)
    return GroupLimits(share, 0.0, share)


def group_limits(mechanism: Mechanism, theta: float, r: int, s: int) -> GroupLimits:
    """Limits of N(r,s,theta)/n, U(r,s,theta)/n and S(r,s,theta)/n."""
    return {
        Mechanism.NB: nb_group_limits,
        Mechanism.AB: ab_group_limits,
        Mechanism.SD: sd_group_limits,
    }[Mechanism(mechanism)](theta, r, s)


# =========================================================================
# Survivors
# =========================================================================

def survivor_fraction(mechanism: Mechanism, r: int, theta: float = 1.0) -> float:
    """Limit of N_n(r, theta) / n."""
    theta = check_theta(theta)
    if r < 1:
        raise BadIndex(f"rounds are indexed from 1, got r={r}")
    mechanism = Mechanism(mechanism)
    if mechanism == Mechanism.NB:
        return naive_limits(theta, r).z_at(r)
    if mechanism == Mechanism.AB:
        return adaptive_limits(theta, check_round(r)).y_at(r)
    return theta if r == 1 else 0.0


def unmatched_after(mechanism: Mechanism, rounds: int) -> float:
    """Limiting fraction of agents still unmatched after `rounds` rounds."""
    if rounds < 0:
        raise BadIndex(f"rounds must be >= 0, got {rounds}")
    return survivor_fraction(mechanism, rounds + 1, 1.0)


def survivor_share_beyond(mechanism: Mechanism, r: int, theta: float) -> float:
    """Limiting share of round-r survivors whose relative position exceeds theta."""
    total = survivor_fraction(mechanism, r, 1.0)
    if total == 0.0:
        raise BadIndex(f"no {Mechanism(mechanism).value} agents survive to round {r}")
    return 1.0 - survivor_fraction(mechanism, r, theta) / total
