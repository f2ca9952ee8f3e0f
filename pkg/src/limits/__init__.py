"""Limits component - asymptotic quantities as the number of agents grows."""
from .omega import OmegaSequence, omega, omega_bounds, omega_sequence
from .naive import naive_limits, z_bounds, ZBounds, check_theta
from .adaptive import adaptive_limits, MAX_ADAPTIVE_ROUND
from .urn import urn_exact, urn_distribution, u_geometric, u_geometric_distribution, u_table
from .rank_limits import (
    q_vector,
    q_s_nb,
    q_s_ab,
    q_s_sd,
    tail_mass,
    tail_bound,
    cumulative_q,
    cumulative_q_vector,
    welfare_limit_kapproval,
    order_bias_limit,
    ab_individual_limits,
    ab_group_limits,
    nb_group_limits,
    sd_group_limits,
    group_limits,
    IndividualLimits,
    GroupLimits,
    survivor_fraction,
    unmatched_after,
    survivor_share_beyond,
)
from .bidding import expected_first_claims

__all__ = [
    # omega
    "OmegaSequence",
    "omega",
    "omega_bounds",
    "omega_sequence",
    # Recursions
    "naive_limits",
    "z_bounds",
    "ZBounds",
    "check_theta",
    "adaptive_limits",
    "MAX_ADAPTIVE_ROUND",
    # Urns
    "urn_exact",
    "urn_distribution",
    "u_geometric",
    "u_geometric_distribution",
    "u_table",
    # Rank distributions
    "q_vector",
    "q_s_nb",
    "q_s_ab",
    "q_s_sd",
    "tail_mass",
    "tail_bound",
    "cumulative_q",
    "cumulative_q_vector",
    # Welfare and bias
    "welfare_limit_kapproval",
    "order_bias_limit",
    # Per-round limits
    "ab_individual_limits",
    "ab_group_limits",
    "nb_group_limits",
    "sd_group_limits",
    "group_limits",
    "IndividualLimits",
    "GroupLimits",
    # Survivors
    "survivor_fraction",
    "unmatched_after",
    "survivor_share_beyond",
    # Finite bidding
    "expected_first_claims",
]
