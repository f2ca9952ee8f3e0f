"""Adaptive Boston limits: y_r(theta), y'_r(theta), g_r(theta)."""
import math

import numpy as np

from src.limits.naive import check_theta
from src.models.limit_state import AdaptiveLimitState
from src.utils.errors import BadIndex

# e^{r-1} overflows long before this; nothing useful happens past it either
MAX_ADAPTIVE_ROUND = 500

# Below this, x + expm1(-x) is evaluated by its series
_SERIES_CUTOFF = 1e-3


def _excess(x: float) -> float:
    """x - (1 - e^-x), accurate for small x."""
    if x < _SERIES_CUTOFF:
        return x * x * (0.5 - x * (1.0 / 6.0 - x * (1.0 / 24.0 - x / 120.0)))
    return x + math.expm1(-x)


def check_round(r: int) -> int:
    if r < 1:
        raise BadIndex(f"rounds are indexed from 1, got r={r}")
    if r > MAX_ADAPTIVE_ROUND:
        raise BadIndex(f"adaptive limits support r <= {MAX_ADAPTIVE_ROUND}, got r={r}")
    return r


def adaptive_limits(theta: float, rounds: int) -> AdaptiveLimitState:
    """
    Evaluate the Adaptive Boston recursions for rounds 1..`rounds`.

        y_1 = theta,  y_{r+1} = y_r - e^{1-r} (1 - exp(-e^{r-1} y_r))
        y'_1 = 1,     y'_{r+1} = y'_r g_r,  g_r = 1 - exp(-e^{r-1} y_r)

    The recursion runs on x_r = e^{r-1} y_r, for which it reads
    x_{r+1} = e (x_r - (1 - e^{-x_r})); this never forms e^{r-1} and keeps
    full relative precision as y_r decays.

    x = 1 is a fixed point of that map with slope e - 1 > 1, so theta = 1
    uses the fixed point directly instead of iterating rounding error.
    """
    theta = check_theta(theta)
    check_round(rounds)

    x = np.empty(rounds)
    g = np.empty(rounds)
    y_prime = np.empty(rounds)

    x_r, yp_r = theta, 1.0
    for i in range(rounds):
        x[i] = x_r
        y_prime[i] = yp_r
        g[i] = -math.expm1(-x_r)
        yp_r *= g[i]
        x_r = 1.0 if theta == 1.0 else math.e * _excess(x_r)

    y = x * np.exp(-np.arange(rounds, dtype=float))
    return AdaptiveLimitState(theta=theta, x=x, y=y, y_prime=y_prime, g=g)
