"""Serial Dictatorship: each agent in turn takes their favourite remaining item."""
from typing import List, Sequence

from src.mechanisms.base import AllocationMechanism, make_record
from src.models.mechanism import Mechanism
from src.models.outcome import Bid, OutcomeRecord
from src.preferences.preference_source import PreferenceSource


class SerialDictatorship(AllocationMechanism):
    """
    Agents choose in position order. Every agent is recorded as exiting in
    round 1; the rank obtained is the number of items the agent had to
    reveal before reaching one still available.
    """

    mechanism = Mechanism.SD

    def allocate(self, sources: Sequence[PreferenceSource]) -> List[OutcomeRecord]:
        remaining_items = set(range(len(sources)))
        records = []
        for agent, src in enumerate(sources):
            item, draws = src.reveal_next_in(remaining_items)
            remaining_items.discard(item)
            records.append(make_record(agent + 1, item, 1, draws, [Bid(1, draws, True)]))
        return records
