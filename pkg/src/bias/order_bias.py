"""Order bias and stochastic dominance across positions."""
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from src.models.rank_distribution import RankDistribution
from src.models.scoring_rule import ScoringRule
from src.utils.errors import DegenerateRule

# Overflow mass above which the bias is reported as an interval
OVERFLOW_INTERVAL_MASS = 1e-4

EXACT_TOL = 1e-12


@dataclass
class OrderBiasReport:
    """
    Both forms of the order bias of a rank distribution.

    max_form      max_{p,q} |U(p) - U(q)| / (u(1) - u(n)), authoritative
    extreme_form  (U(first) - U(last)) / (u(1) - u(n)) over the kept positions
    interval      bounds on max_form when truncated ranks carry real mass
    std_error     standard error of extreme_form (estimated matrices)
    """
    max_form: float
    extreme_form: float
    interval: Optional[Tuple[float, float]] = None
    std_error: float = 0.0
    disagreement: bool = False


def _expected_utilities(D: RankDistribution, rule: ScoringRule):
    """Per-row expected utility (point, low, high) and the rule's range."""
    u = rule.materialize(D.n)
    spread = float(u[0] - u[-1])
    if spread <= 0.0:
        raise DegenerateRule(f"{rule.label} gives rank 1 and rank {D.n} the same utility")

    width = D.width
    known = D.probabilities @ u[:width]
    if width < D.n:
        tail = u[width:]
        low = known + D.overflow * tail.min()
        high = known + D.overflow * tail.max()
        point = known + D.overflow * tail.mean()
        second = D.probabilities @ (u[:width] ** 2) + D.overflow * float((tail ** 2).mean())
    else:
        low = high = point = known
        second = D.probabilities @ (u ** 2)
    return point, low, high, second, spread


def order_bias_report(D: RankDistribution, rule: ScoringRule) -> OrderBiasReport:
    point, low, high, second, spread = _expected_utilities(D, rule)

    max_form = float((point.max() - point.min()) / spread)
    extreme_form = float((point[0] - point[-1]) / spread)

    interval = None
    if D.overflow.max(initial=0.0) > OVERFLOW_INTERVAL_MASS:
        gaps_low = max(0.0, float(low.max() - high.min()))
        gaps_high = float(high.max() - low.min())
        interval = (min(1.0, gaps_low / spread), min(1.0, gaps_high / spread))

    std_error = 0.0
    disagreement = False
    if D.is_estimated and D.trials:
        variance = np.clip(second - point ** 2, 0.0, None) / D.trials
        std_error = float(np.sqrt(variance[0] + variance[-1]) / spread)
        disagreement = abs(max_form - extreme_form) > 3.0 * std_error
    else:
        disagreement = abs(max_form - extreme_form) > 1e-9

    return OrderBiasReport(
        max_form=min(1.0, max(0.0, max_form)),
        extreme_form=extreme_form,
        interval=interval,
        std_error=std_error,
        disagreement=disagreement,
    )


def order_bias(D: RankDistribution, rule: ScoringRule) -> float:
    """Normalized largest gap in expected utility between any two positions."""
    return order_bias_report(D, rule).max_form


def dominance_violations(D: RankDistribution, sigma: float = 3.0,
                         tol: float = EXACT_TOL) -> List[Tuple[int, int]]:
    """
    (p, s) cells where P(S_p <= s) < P(S_next <= s) for consecutive kept
    positions p < next, beyond `sigma` standard errors for estimated
    matrices (and `tol` always).
    """
    cumulative = D.cumulative()
    if D.is_estimated and D.trials:
        # cumsum can overshoot 1 by rounding; keep the variance non-negative
        clipped = np.clip(cumulative, 0.0, 1.0)
        var = clipped * (1.0 - clipped) / D.trials
        slack = sigma * np.sqrt(var[:-1] + var[1:]) + tol
    else:
        slack = np.full_like(cumulative[:-1], tol)

    excess = cumulative[1:] - cumulative[:-1] - slack
    rows, cols = np.nonzero(excess > 0.0)
    return [(D.positions[i], int(j) + 1) for i, j in zip(rows, cols)]


def rows_dominate(D: RankDistribution, tol: float = EXACT_TOL) -> bool:
    """True when every kept row stochastically dominates the next (to within `tol`)."""
    cumulative = D.cumulative()
    return bool(np.all(cumulative[:-1] >= cumulative[1:] - tol))
