"""Utilitarian welfare W_n(theta) = sum_s sigma_n(s) S_n(s, theta), empirical and limiting."""
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from src.limits.naive import check_theta
from src.limits.rank_limits import cumulative_q_vector
from src.mechanisms.trial_runner import TrialResults
from src.models.mechanism import Mechanism
from src.models.outcome import Assignment, check_theta_grid, segment_size
from src.models.scoring_rule import ScoringRule, WelfareCurve
from src.utils.config import config
from src.utils.logger import setup_logger

logger = setup_logger("Welfare")


def welfare_of(assignment: Assignment, rule: ScoringRule, theta: float, raw: bool = False) -> float:
    """
    Welfare of the agents in A_n(theta), the first floor(n theta) positions.

    Returns W_n(theta) / n, or the total W_n(theta) when `raw` is set.
    """
    theta = check_theta(theta)
    n = assignment.n
    cutoff = segment_size(n, theta)
    sigma = rule.materialize(n)
    ranks = np.fromiter((r.rank_obtained for r in assignment.records[:cutoff]), np.int64, cutoff)
    total = float(sigma[ranks - 1].sum())
    return total if raw else total / n


def empirical_welfare_curve(results: TrialResults, rule: Optional[ScoringRule] = None) -> WelfareCurve:
    """Mean W_n(theta)/n over the trials of a run made with a scoring rule."""
    job = results.job
    if job.rule is None:
        raise ValueError("trial job was run without a scoring rule")
    if rule is not None and rule != job.rule:
        raise ValueError(f"trials were scored with {job.rule.label}, not {rule.label}")
    return WelfareCurve(
        mechanism=job.mechanism,
        rule=job.rule.label,
        source="empirical",
        theta_grid=list(job.theta_grid),
        values=results.mean_welfare().tolist(),
        n=job.n,
        trials=results.trials,
    )


class LimitWelfare:
    """
    Limiting welfare theta -> sum_s lambda_s integral_0^theta q_s for one
    mechanism and rule.

    Ranks beyond s_max carry the rule's trailing weight, so the value is
    exact for k-approval, Borda and padded custom rules; the truncated mass
    is still reported per theta.
    """

    def __init__(self, mechanism: Mechanism, rule: ScoringRule, s_max: Optional[int] = None):
        self.mechanism = Mechanism(mechanism)
        self.rule = rule
        s_max = s_max or config.s_max
        if rule.kind == "k_approval":
            s_max = rule.k  # weights vanish past k
        self.s_max = s_max
        self.weights = rule.limit_vector(s_max)
        self.tail_weight = rule.limit_tail_weight()

    def evaluate(self, theta: float):
        """(welfare, truncated mass) at theta."""
        theta = check_theta(theta)
        cumulative = cumulative_q_vector(self.mechanism, theta, self.s_max)
        tail = max(0.0, theta - float(cumulative.sum()))
        return float(self.weights @ cumulative) + self.tail_weight * tail, tail

    def __call__(self, theta: float) -> float:
        return self.evaluate(theta)[0]


def welfare_limit_curve(
    mechanism: Mechanism,
    rule: ScoringRule,
    theta_grid: Optional[Sequence[float]] = None,
    s_max: Optional[int] = None,
) -> WelfareCurve:
    """Limiting W(theta)/n on a theta grid."""
    grid = check_theta_grid(config.default_theta_grid() if theta_grid is None else theta_grid)
    limit = LimitWelfare(mechanism, rule, s_max)
    values, tails = [], []
    for theta in grid:
        value, tail = limit.evaluate(theta)
        values.append(value)
        tails.append(tail)
    logger.debug(f"{limit.mechanism.value} {rule.label} limit curve: W(1)={values[-1]:.6f}")
    return WelfareCurve(
        mechanism=limit.mechanism,
        rule=rule.label,
        source="limit",
        theta_grid=grid,
        values=values,
        s_max=limit.s_max,
        tail_mass=tails,
    )


def welfare_median(mechanism: Mechanism, rule: ScoringRule, s_max: Optional[int] = None,
                   xtol: float = 1e-10) -> float:
    """theta* where the limiting welfare curve reaches half its value at theta = 1."""
    limit = LimitWelfare(mechanism, rule, s_max)
    half = limit(1.0) / 2.0
    return float(brentq(lambda theta: limit(theta) - half, 0.0, 1.0, xtol=xtol))
