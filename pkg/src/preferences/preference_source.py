"""Lazily generated Impartial Culture preferences.

An agent's preference order is a uniformly random permutation of the
items, but the allocation processes only ever look at a prefix of it.
PreferenceSource reveals that prefix one item at a time with a partial
Fisher-Yates shuffle stored sparsely: position i of the virtual
permutation holds `swaps.get(i, i)`. The dict never grows beyond twice
the number of reveals, so sparse use (Boston rounds) and dense use
(serial dictatorship late in the order) cost O(1) per reveal either way.
"""
from typing import Collection, Dict, List, Optional, Set, Tuple, Union

from src.models.mechanism import RngSpec
from src.utils.errors import ExhaustedPreferences, NoAvailableItem
from src.utils.random_stream import PCG32, agent_stream


class PreferenceSource:
    """
    One agent's preference order over items 0..n_items-1, revealed on demand.

    Single-owner mutable state. Distinct sources share nothing and may be
    used from different threads.
    """

    __slots__ = ("n_items", "rng_stream", "consumed", "revealed", "_swaps")

    def __init__(self, n_items: int, rng_stream: PCG32):
        if n_items < 1:
            raise ValueError(f"n_items must be >= 1, got {n_items}")
        self.n_items = n_items
        self.rng_stream = rng_stream
        self.consumed: Set[int] = set()
        self.revealed: List[int] = []  # preference order prefix, best first
        self._swaps: Dict[int, int] = {}

    @classmethod
    def for_agent(cls, n_items: int, rng: RngSpec, agent_index: int,
                  trial_seed: Optional[int] = None) -> "PreferenceSource":
        """Source for agent `agent_index` (0-based) of the trial described by `rng`."""
        seed = rng.trial_seed() if trial_seed is None else trial_seed
        return cls(n_items, agent_stream(seed, agent_index))

    @property
    def remaining(self) -> int:
        return self.n_items - len(self.revealed)

    def reveal_next(self) -> int:
        """Next item in the preference order, uniform over the unconsumed items."""
        k = len(self.revealed)
        if k >= self.n_items:
            raise ExhaustedPreferences(f"all {self.n_items} items already revealed")

        j = k + self.rng_stream.next_bounded(self.n_items - k)
        swaps = self._swaps
        item = swaps.get(j, j)
        if j != k:
            swaps[j] = swaps.get(k, k)
        swaps.pop(k, None)

        self.consumed.add(item)
        self.revealed.append(item)
        return item

    def reveal_next_in(self, available: Collection[int]) -> Tuple[int, int]:
        """
        Reveal items until one of `available` comes up.

        Returns:
            (item, draws) where draws counts every item revealed by this
            call, the returned one included.
        """
        # available can only be covered by consumed if it is no larger
        if len(available) <= len(self.consumed) and all(
            item in self.consumed for item in available
        ):
            raise NoAvailableItem(
                f"none of the {len(available)} available items is unrevealed"
            )

        draws = 0
        while True:
            item = self.reveal_next()
            draws += 1
            if item in available:
                return item, draws

    def rank_of(self, item: int) -> int:
        """1-based rank of an already revealed item."""
        return self.revealed.index(item) + 1


class ProfileSource(PreferenceSource):
    """A fixed, fully specified preference order revealed through the same interface."""

    __slots__ = ("order",)

    def __init__(self, order: List[int]):
        if not order:
            raise ValueError("preference order is empty")
        if sorted(order) != list(range(len(order))):
            raise ValueError(f"preference order is not a permutation of 0..{len(order) - 1}")
        self.order = list(order)
        self.n_items = len(order)
        self.rng_stream = None
        self.consumed = set()
        self.revealed = []
        self._swaps = {}

    def reveal_next(self) -> int:
        k = len(self.revealed)
        if k >= self.n_items:
            raise ExhaustedPreferences(f"all {self.n_items} items already revealed")
        item = self.order[k]
        self.consumed.add(item)
        self.revealed.append(item)
        return item


def reveal_next(src: PreferenceSource) -> int:
    return src.reveal_next()


def reveal_next_in(src: PreferenceSource, available: Collection[int]) -> Tuple[int, int]:
    return src.reveal_next_in(available)


def full_profile(n: int, seed: Union[int, RngSpec]) -> List[List[int]]:
    """
    Complete preference orders for n agents over n items.

    Uses the same per-agent streams as the lazy sources, so running a
    mechanism on this profile reproduces the lazy run with the same RngSpec.
    """
    rng = seed if isinstance(seed, RngSpec) else RngSpec(master_seed=seed)
    trial_seed = rng.trial_seed()
    profile = []
    for agent in range(n):
        src = PreferenceSource.for_agent(n, rng, agent, trial_seed)
        profile.append([src.reveal_next() for _ in range(n)])
    return profile
