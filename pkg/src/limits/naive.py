"""Naive Boston limits: z_r(theta), z'_r(theta), f_r(theta)."""
import math
from typing import NamedTuple

import numpy as np

from src.limits.omega import omega, omega_sequence
from src.models.limit_state import NaiveLimitState
from src.utils.errors import BadIndex, BadTheta

C1 = math.e - 1.0
C2 = math.exp(1.0 + math.exp(-1.0))


def check_theta(theta: float) -> float:
    theta = float(theta)
    if not 0.0 <= theta <= 1.0:
        raise BadTheta(f"theta must lie in [0, 1], got {theta}")
    return theta


def naive_limits(theta: float, rounds: int) -> NaiveLimitState:
    """
    Evaluate the Naive Boston recursions for rounds 1..`rounds`.

        z_1 = theta,  z_{r+1} = z_r - (1 - exp(-z_r)) omega_r
        z'_1 = 1,     z'_{r+1} = z'_r f_r,  f_r = 1 - omega_r exp(-z_r)
    """
    theta = check_theta(theta)
    if rounds < 1:
        raise BadIndex(f"need at least one round, got {rounds}")

    w = omega_sequence.array(rounds)
    z = np.empty(rounds)
    z_prime = np.empty(rounds)
    f = np.empty(rounds)

    z_r, zp_r = theta, 1.0
    for i in range(rounds):
        z[i] = z_r
        z_prime[i] = zp_r
        f[i] = 1.0 - w[i] * math.exp(-z_r)
        zp_r *= f[i]
        z_r = max(0.0, z_r + math.expm1(-z_r) * w[i])

    return NaiveLimitState(theta=theta, omega=w, z=z, z_prime=z_prime, f=f)


class ZBounds(NamedTuple):
    """Sandwiches for z'_r(theta) and z_r(theta), valid for r >= 2."""
    z_prime_lower: float
    z_prime_upper: float
    z_lower: float
    z_upper: float


def z_bounds(theta: float, r: int) -> ZBounds:
    """
    c1 w_r (1 - e^-theta) <= z'_r <= c2 w_r (1 - e^-theta) and, integrated,
    c1 w_r (theta + e^-theta - 1) <= z_r <= c2 w_r (theta + e^-theta - 1),
    with c1 = e - 1 and c2 = exp(1 + 1/e).
    """
    theta = check_theta(theta)
    if r < 2:
        raise BadIndex(f"z bounds hold from round 2, got r={r}")
    w = omega(r)
    slope = -math.expm1(-theta)
    area = theta + math.expm1(-theta)
    return ZBounds(C1 * w * slope, C2 * w * slope, C1 * w * area, C2 * w * area)
