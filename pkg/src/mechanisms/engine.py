"""Entry points for running mechanisms."""
from typing import Dict, Optional, Sequence, Tuple

from src.mechanisms.adaptive_boston import AdaptiveBoston
from src.mechanisms.base import AllocationMechanism
from src.mechanisms.naive_boston import NaiveBoston
from src.mechanisms.serial_dictatorship import SerialDictatorship
from src.models.mechanism import Mechanism, RngSpec
from src.models.outcome import Assignment, RoundTrace, check_theta_grid
from src.utils.config import config

_ENGINES: Dict[Mechanism, AllocationMechanism] = {}


def get_mechanism(mechanism: Mechanism) -> AllocationMechanism:
    """Shared engine instance for a mechanism tag."""
    mechanism = Mechanism(mechanism)
    if mechanism not in _ENGINES:
        engine_class = {
            Mechanism.SD: SerialDictatorship,
            Mechanism.NB: NaiveBoston,
            Mechanism.AB: AdaptiveBoston,
        }[mechanism]
        _ENGINES[mechanism] = engine_class()
    return _ENGINES[mechanism]


def run_sd(n: int, rng: RngSpec) -> Assignment:
    return get_mechanism(Mechanism.SD).run(n, rng)


def run_nb(n: int, rng: RngSpec) -> Assignment:
    return get_mechanism(Mechanism.NB).run(n, rng)


def run_ab(n: int, rng: RngSpec) -> Assignment:
    return get_mechanism(Mechanism.AB).run(n, rng)


def run_mechanism(mechanism: Mechanism, n: int, rng: RngSpec) -> Assignment:
    return get_mechanism(mechanism).run(n, rng)


def assign_from_profile(mechanism: Mechanism, profile: Sequence[Sequence[int]]) -> Assignment:
    """Run a mechanism on explicit preference orders; profile[a] is agent a's order, best first."""
    return get_mechanism(mechanism).run_profile(profile)


def run_with_trace(
    mechanism: Mechanism,
    n: int,
    rng: RngSpec,
    theta_grid: Optional[Sequence[float]] = None,
) -> Tuple[Assignment, RoundTrace]:
    """
    Run a mechanism and derive its per-round population counts.

    The default theta grid is {0, 0.05, ..., 1}.
    """
    grid = check_theta_grid(config.default_theta_grid() if theta_grid is None else theta_grid)
    assignment = run_mechanism(mechanism, n, rng).check()
    return assignment, RoundTrace.from_assignment(assignment, grid)
