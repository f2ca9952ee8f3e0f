"""Shared plumbing for the allocation mechanisms."""
from abc import ABC, abstractmethod
from typing import List, Optional, Sequence

from src.models.mechanism import Mechanism, RngSpec
from src.models.outcome import Assignment, Bid, OutcomeRecord
from src.preferences.preference_source import PreferenceSource, ProfileSource
from src.utils.errors import EmptyInstance, UnequalInstance
from src.utils.logger import setup_logger
from src.utils.random_stream import agent_stream


def check_instance(n_agents: int, n_items: Optional[int] = None) -> int:
    """Validate instance size; agents and items must match."""
    if n_agents < 1:
        raise EmptyInstance(f"need at least one agent, got n={n_agents}")
    if n_items is not None and n_items != n_agents:
        raise UnequalInstance(f"{n_agents} agents but {n_items} items")
    return n_agents


def make_record(position: int, item: int, exit_round: int, rank: int,
                bids: List[Bid]) -> OutcomeRecord:
    # model_construct skips validation; the engines guarantee the field ranges
    return OutcomeRecord.model_construct(
        agent_position=position,
        item=item,
        exit_round=exit_round,
        rank_obtained=rank,
        bids=bids,
    )


class AllocationMechanism(ABC):
    """
    A housing-allocation mechanism over n agents and n items.

    Agents are processed in the fixed order rho = identity, agent index
    a (0-based) sitting at position a + 1. Subclasses implement `allocate`
    on a list of preference sources, so the same engine serves lazily
    generated IC preferences and explicit profiles.
    """

    mechanism: Mechanism

    def __init__(self):
        self.logger = setup_logger(self.__class__.__name__)

    @abstractmethod
    def allocate(self, sources: Sequence[PreferenceSource]) -> List[OutcomeRecord]:
        """Run the mechanism; one record per agent, in position order."""

    def run(self, n: int, rng: RngSpec, n_items: Optional[int] = None) -> Assignment:
        """
        Run on n agents with Impartial Culture preferences drawn from `rng`.

        The result is not validated here; bulk trials call this directly and
        `run_with_trace` validates through `Assignment.check`.
        """
        check_instance(n, n_items)
        trial_seed = rng.trial_seed()
        sources = [PreferenceSource(n, agent_stream(trial_seed, a)) for a in range(n)]
        records = self.allocate(sources)
        self.logger.debug(
            f"{self.mechanism.value} n={n} trial={rng.trial_index}: "
            f"{max(r.exit_round for r in records)} rounds"
        )
        return Assignment.model_construct(n=n, mechanism=self.mechanism, rng=rng, records=records)

    def run_profile(self, profile: Sequence[Sequence[int]]) -> Assignment:
        """Run deterministically on explicit preference orders (agent-major)."""
        n = check_instance(len(profile))
        for order in profile:
            if len(order) != n:
                raise UnequalInstance(f"{n} agents but a preference order over {len(order)} items")
        sources = [ProfileSource(list(order)) for order in profile]
        records = self.allocate(sources)
        assignment = Assignment.model_construct(n=n, mechanism=self.mechanism, rng=None, records=records)
        return assignment.check()
