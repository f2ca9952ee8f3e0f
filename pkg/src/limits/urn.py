"""Urn distributions behind Adaptive Boston preference ranks, and the u-table.

Urn process for n_1 > n_2 > ... > n_r > 0: put n_1 balls in an urn; for
i = 1..r, call the n_i lowest-numbered balls left "good" and draw without
replacement until a good ball appears. q(s; n_1..n_r) is the law of the
total number of balls drawn. As the n_i grow with n_i / n_1 -> p_i it tends
to u(s; p_1..p_r), the law of r + G_1 + ... + G_r with G_i geometric(p_i)
on {0, 1, ...}. u_rs is u(s; 1, e^-1, ..., e^{1-r}).
"""
import math
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy.signal import lfilter

from src.models.limit_state import UTable
from src.utils.errors import BadIndex, BadProb, BadUrnSpec


def _check_urn(n_list: Sequence[int]) -> list:
    balls = [int(v) for v in n_list]
    if not balls:
        raise BadUrnSpec("urn needs at least one stage")
    if balls[-1] < 1:
        raise BadUrnSpec(f"ball counts must be positive, got {balls}")
    if any(a <= b for a, b in zip(balls, balls[1:])):
        raise BadUrnSpec(f"ball counts must be strictly decreasing, got {balls}")
    return balls


def urn_distribution(n_list: Sequence[int], s_max: Optional[int] = None) -> np.ndarray:
    """
    q(1..S; n_1..n_r) as an array, S = n_1 - n_r + 1 unless `s_max` cuts it short.

    Entry s-1 holds q(s). Truncating is exact for the kept entries: q(s)
    only depends on earlier stages at totals below s.
    """
    balls = _check_urn(n_list)
    n1 = balls[0]
    support = n1 - balls[-1] + 1
    size = support if s_max is None else min(support, s_max)
    if size < 1:
        return np.zeros(0)

    dist = np.zeros(size + 1)  # index = total draws
    dist[1] = 1.0
    for good in balls[1:]:
        step = np.zeros(size + 1)
        for t in np.nonzero(dist)[0]:
            p_t = dist[t]
            miss = 1.0
            for s in range(t + 1, size + 1):
                left = n1 - (s - 1)  # balls in the urn before this draw
                if left < good:
                    break
                step[s] += p_t * miss * good / left
                miss *= 1.0 - good / left
                if miss == 0.0:
                    break
        dist = step
    return dist[1:]


def urn_exact(s: int, n_list: Sequence[int]) -> float:
    """q(s; n_1, ..., n_r)."""
    balls = _check_urn(n_list)
    if s < 1:
        raise BadIndex(f"draw counts start at 1, got s={s}")
    if s < len(balls) or s > balls[0] - balls[-1] + 1:
        return 0.0
    return float(urn_distribution(balls, s_max=s)[s - 1])


def _check_probs(p_list: Sequence[float]) -> list:
    probs = [float(p) for p in p_list]
    if not probs:
        raise BadProb("need at least one success probability")
    if any(not 0.0 < p <= 1.0 for p in probs):
        raise BadProb(f"success probabilities must lie in (0, 1], got {probs}")
    return probs


def u_geometric_distribution(p_list: Sequence[float], s_max: int) -> np.ndarray:
    """u(1..s_max; p_1..p_r) by successive convolution with shifted geometric laws."""
    probs = _check_probs(p_list)
    if s_max < 1:
        raise BadIndex(f"s_max must be >= 1, got {s_max}")

    # index = s; a single stage contributes 1 + G
    k = np.arange(s_max + 1)
    dist = np.zeros(s_max + 1)
    dist[0] = 1.0
    for p in probs:
        step = np.zeros(s_max + 1)
        step[1:] = p * (1.0 - p) ** (k[1:] - 1)
        dist = np.convolve(dist, step)[: s_max + 1]
    return dist[1:]


def u_geometric(s: int, p_list: Sequence[float]) -> float:
    """u(s; p_1, ..., p_r)."""
    probs = _check_probs(p_list)
    if s < 1:
        raise BadIndex(f"ranks start at 1, got s={s}")
    if s < len(probs):
        return 0.0
    return float(u_geometric_distribution(probs, s)[s - 1])


@lru_cache(maxsize=8)
def _u_values(s_max: int) -> np.ndarray:
    values = np.zeros((s_max, s_max))
    values[0, 0] = 1.0
    for r in range(2, s_max + 1):
        hit = math.exp(1 - r)
        # u_rs = hit * u_{r-1,s-1} + (1 - hit) * u_{r,s-1}: a first-order recursive filter
        shifted = np.zeros(s_max)
        shifted[1:] = hit * values[r - 2, :-1]
        values[r - 1] = lfilter([1.0], [1.0, -(1.0 - hit)], shifted)
    values.setflags(write=False)
    return values


def u_table(s_max: int) -> UTable:
    """u_rs for 1 <= r, s <= s_max. Memoized; the returned array is read-only."""
    if s_max < 1:
        raise BadIndex(f"s_max must be >= 1, got {s_max}")
    return UTable(s_max=s_max, values=_u_values(s_max))
