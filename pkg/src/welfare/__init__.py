"""Welfare component - utilitarian welfare under positional scoring rules."""
from .welfare import (
    welfare_of,
    empirical_welfare_curve,
    welfare_limit_curve,
    welfare_median,
    LimitWelfare,
)

__all__ = [
    "welfare_of",
    "empirical_welfare_curve",
    "welfare_limit_curve",
    "welfare_median",
    "LimitWelfare",
]
