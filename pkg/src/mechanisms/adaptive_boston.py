"""Adaptive Boston: each round, bid for the favourite item still available at round start."""
from typing import Dict, List, Sequence

from src.mechanisms.base import AllocationMechanism, make_record
from src.models.mechanism import Mechanism
from src.models.outcome import Bid, OutcomeRecord
from src.preferences.preference_source import PreferenceSource


class AdaptiveBoston(AllocationMechanism):
    """
    Bids are made against the set of items available at the start of the
    round. The rank of a bid is found by revealing the agent's preferences
    until an available item comes up; ranks accumulate across rounds, so
    the rank obtained is the total number of items the agent revealed.

    Every item an agent has revealed is unavailable by the time they bid
    again (it was either skipped as taken or lost to an earlier bidder),
    which keeps each round's reveal uniform over the available items.
    """

    mechanism = Mechanism.AB

    def allocate(self, sources: Sequence[PreferenceSource]) -> List[OutcomeRecord]:
        n = len(sources)
        available = set(range(n))
        bids: Dict[int, List[Bid]] = {agent: [] for agent in range(n)}
        records: List[OutcomeRecord] = [None] * n
        remaining = list(range(n))

        r = 0
        while remaining:
            r += 1
            at_round_start = frozenset(available)
            losers = []
            for agent in remaining:
                src = sources[agent]
                item, _ = src.reveal_next_in(at_round_start)
                rank = len(src.revealed)
                if item in available:
                    available.discard(item)
                    bids[agent].append(Bid(r, rank, True))
                    records[agent] = make_record(agent + 1, item, r, rank, bids[agent])
                else:
                    bids[agent].append(Bid(r, rank, False))
                    losers.append(agent)
            remaining = losers

        return records
