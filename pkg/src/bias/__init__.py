"""Bias component - rank distribution matrices and order bias."""
from .rank_matrix import (
    sd_rank_probability,
    sd_exact_matrix,
    estimate_matrix,
    distribution_from_results,
    last_agent_distribution,
)
from .order_bias import (
    OrderBiasReport,
    order_bias,
    order_bias_report,
    rows_dominate,
    dominance_violations,
)

__all__ = [
    "sd_rank_probability",
    "sd_exact_matrix",
    "estimate_matrix",
    "distribution_from_results",
    "last_agent_distribution",
    "OrderBiasReport",
    "order_bias",
    "order_bias_report",
    "rows_dominate",
    "dominance_violations",
]
