"""Mechanisms component - Serial Dictatorship, Naive Boston and Adaptive Boston."""
from .base import AllocationMechanism, check_instance
from .serial_dictatorship import SerialDictatorship
from .naive_boston import NaiveBoston
from .adaptive_boston import AdaptiveBoston
from .engine import (
    get_mechanism,
    run_sd,
    run_nb,
    run_ab,
    run_mechanism,
    run_with_trace,
    assign_from_profile,
)
from .oracle import (
    brute_force_distribution,
    brute_force_fractions,
    enumerate_profile_distribution,
    enumerate_profile_fractions,
    first_available_draws,
)
from .trial_runner import TrialRunner, TrialJob, TrialResults, run_trial_batch

__all__ = [
    "AllocationMechanism",
    "check_instance",
    "SerialDictatorship",
    "NaiveBoston",
    "AdaptiveBoston",
    # Entry points
    "get_mechanism",
    "run_sd",
    "run_nb",
    "run_ab",
    "run_mechanism",
    "run_with_trace",
    "assign_from_profile",
    # Exact oracles
    "brute_force_distribution",
    "brute_force_fractions",
    "enumerate_profile_distribution",
    "enumerate_profile_fractions",
    "first_available_draws",
    # Trials
    "TrialRunner",
    "TrialJob",
    "TrialResults",
    "run_trial_batch",
]
