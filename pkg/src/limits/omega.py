"""The omega sequence: limiting Naive Boston survivor fractions.

omega_1 = 1, omega_{r+1} = omega_r * exp(-omega_r).
"""
import math
import threading
from typing import List, Tuple

import numpy as np

from src.utils.errors import BadIndex


class OmegaSequence:
    """
    Memoized omega_1, omega_2, ...

    The table only grows, under a lock, so concurrent readers never see a
    partially written value.
    """

    def __init__(self):
        self._values: List[float] = [1.0]
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._values)

    def _extend_to(self, r: int) -> None:
        with self._lock:
            values = self._values
            w = values[-1]
            for _ in range(len(values), r):
                w = w * math.exp(-w)
                values.append(w)

    def __call__(self, r: int) -> float:
        if r < 1:
            raise BadIndex(f"omega is indexed from 1, got r={r}")
        if r > len(self._values):
            self._extend_to(r)
        return self._values[r - 1]

    def array(self, rounds: int) -> np.ndarray:
        """omega_1..omega_rounds."""
        if rounds < 1:
            raise BadIndex(f"need at least one round, got {rounds}")
        if rounds > len(self._values):
            self._extend_to(rounds)
        return np.array(self._values[:rounds])


omega_sequence = OmegaSequence()


def omega(r: int) -> float:
    return omega_sequence(r)


def omega_bounds(r: int) -> Tuple[float, float]:
    """(1 / (r + ln r), 1 / r); omega_r lies strictly between them for r >= 3."""
    if r < 1:
        raise BadIndex(f"omega is indexed from 1, got r={r}")
    return 1.0 / (r + math.log(r)), 1.0 / r
