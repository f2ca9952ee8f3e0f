"""Naive Boston: in round r every unmatched agent bids for their r-th choice."""
from typing import Dict, List, Sequence

from src.mechanisms.base import AllocationMechanism, make_record
from src.models.mechanism import Mechanism
from src.models.outcome import Bid, OutcomeRecord
from src.preferences.preference_source import PreferenceSource


class NaiveBoston(AllocationMechanism):
    """
    Bids ignore availability: the round-r bid is always the r-th preference,
    even for an item matched in an earlier round. An item still unmatched at
    the start of round r goes to the earliest bidder in the order rho, so
    processing bidders in position order and letting the first bid on a
    free item win reproduces the tie-break. Rank obtained equals exit round.
    """

    mechanism = Mechanism.NB

    def allocate(self, sources: Sequence[PreferenceSource]) -> List[OutcomeRecord]:
        n = len(sources)
        taken = bytearray(n)
        bids: Dict[int, List[Bid]] = {agent: [] for agent in range(n)}
        records: List[OutcomeRecord] = [None] * n
        remaining = list(range(n))

        r = 0
        while remaining:
            r += 1
            # An agent who has bid on all n items has been matched
            assert r <= n, f"{len(remaining)} agents unmatched after round {n}"

            losers = []
            for agent in remaining:
                item = sources[agent].reveal_next()
                if taken[item]:
                    bids[agent].append(Bid(r, r, False))
                    losers.append(agent)
                else:
                    taken[item] = 1
                    bids[agent].append(Bid(r, r, True))
                    records[agent] = make_record(agent + 1, item, r, r, bids[agent])
            remaining = losers

        return records
