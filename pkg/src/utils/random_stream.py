"""Deterministic per-agent random streams.

Derivation rule (stable across versions):

    trial_seed = SeedSequence(master_seed, spawn_key=(trial_index,)).generate_state(1, uint64)[0]
    agent_seed = splitmix64(trial_seed + (agent_index + 1) * GOLDEN_GAMMA)
    stream     = PCG32(seed=agent_seed, stream=agent_index)

Every agent of every trial therefore owns an independent stream whose
output does not depend on the order in which agents or trials are evaluated.
"""
from typing import List, Sequence, TypeVar

import numpy as np

T = TypeVar("T")

MASK_64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(value: int) -> int:
    """One SplitMix64 finalization step."""
    z = (value + GOLDEN_GAMMA) & MASK_64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK_64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK_64
    return z ^ (z >> 31)


def derive_trial_seed(master_seed: int, trial_index: int) -> int:
    """64-bit seed for one trial, from numpy's SeedSequence."""
    seq = np.random.SeedSequence(entropy=master_seed & MASK_64, spawn_key=(trial_index,))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def derive_agent_seed(trial_seed: int, agent_index: int) -> int:
    """64-bit seed for one agent inside a trial."""
    return splitmix64((trial_seed + (agent_index + 1) * GOLDEN_GAMMA) & MASK_64)


class PCG32:
    """
    PCG32 (Permuted Congruential Generator), XSH-RR output.

    State is 64-bit, output is 32-bit. Pure integer arithmetic, so the
    sequence is identical on every platform.
    """

    MULTIPLIER = 6364136223846793005
    MASK_32 = (1 << 32) - 1

    __slots__ = ("state", "increment")

    def __init__(self, seed: int, stream: int = 0):
        # Increment must be odd
        self.increment = ((stream << 1) | 1) & MASK_64
        self.state = 0
        self._step()
        self.state = (self.state + seed) & MASK_64
        self._step()

    def _step(self) -> None:
        self.state = (self.state * self.MULTIPLIER + self.increment) & MASK_64

    def next_u32(self) -> int:
        """Next 32-bit unsigned integer."""
        old_state = self.state
        self.state = (old_state * self.MULTIPLIER + self.increment) & MASK_64

        xorshifted = (((old_state >> 18) ^ old_state) >> 27) & self.MASK_32
        rot = old_state >> 59
        return ((xorshifted >> rot) | (xorshifted << ((-rot) & 31))) & self.MASK_32

    def next_bounded(self, bound: int) -> int:
        """
        Uniform integer in [0, bound), rejection sampled (no modulo bias).

        Args:
            bound: Upper bound (exclusive), 1 <= bound <= 2**32

        Returns:
            Random integer in [0, bound)
        """
        if bound <= 0 or bound > self.MASK_32 + 1:
            raise ValueError(f"bound must be in [1, 2**32], got {bound}")
        if bound == 1:
            return 0

        threshold = ((self.MASK_32 + 1) - bound) % bound
        while True:
            r = self.next_u32()
            if r >= threshold:
                return r % bound

    def random_float(self) -> float:
        """Uniform float in [0, 1)."""
        return self.next_u32() / (self.MASK_32 + 1)

    def sample(self, population: Sequence[T], k: int) -> List[T]:
        """k distinct elements of population, by partial Fisher-Yates."""
        n = len(population)
        if k < 0 or k > n:
            raise ValueError(f"cannot sample {k} from {n}")

        pool = list(population)
        result = []
        for i in range(k):
            j = self.next_bounded(n - i)
            result.append(pool[j])
            pool[j] = pool[n - 1 - i]
        return result


def agent_stream(trial_seed: int, agent_index: int) -> PCG32:
    """Stream owned by agent `agent_index` (0-based) in the trial seeded by `trial_seed`."""
    return PCG32(seed=derive_agent_seed(trial_seed, agent_index), stream=agent_index)
