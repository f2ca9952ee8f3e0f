"""Limiting recursion states (naive and adaptive Boston) and the u-table."""
from dataclasses import dataclass

import numpy as np

from src.utils.errors import BadIndex


def _at(values: np.ndarray, r: int, name: str) -> float:
    if r < 1 or r > len(values):
        raise BadIndex(f"{name}: round {r} outside 1..{len(values)}")
    return float(values[r - 1])


@dataclass(frozen=True)
class NaiveLimitState:
    """
    Naive Boston limits at relative position theta, rounds 1..R.

    z[r-1]        z_r(theta), fraction of all agents in A(theta) present at round r
    z_prime[r-1]  z'_r(theta), probability the agent at theta is present at round r
    f[r-1]        f_r(theta) = 1 - omega_r exp(-z_r), survival probability through round r
    """
    theta: float
    omega: np.ndarray
    z: np.ndarray
    z_prime: np.ndarray
    f: np.ndarray

    @property
    def rounds(self) -> int:
        return len(self.z)

    def z_at(self, r: int) -> float:
        return _at(self.z, r, "z")

    def z_prime_at(self, r: int) -> float:
        return _at(self.z_prime, r, "z_prime")

    def f_at(self, r: int) -> float:
        return _at(self.f, r, "f")


@dataclass(frozen=True)
class AdaptiveLimitState:
    """
    Adaptive Boston limits at relative position theta, rounds 1..R.

    x[r-1] = e^{r-1} y_r(theta) is the scaled form the recursion runs on.
    """
    theta: float
    x: np.ndarray
    y: np.ndarray
    y_prime: np.ndarray
    g: np.ndarray

    @property
    def rounds(self) -> int:
        return len(self.y)

    def y_at(self, r: int) -> float:
        return _at(self.y, r, "y")

    def y_prime_at(self, r: int) -> float:
        return _at(self.y_prime, r, "y_prime")

    def g_at(self, r: int) -> float:
        return _at(self.g, r, "g")


@dataclass(frozen=True)
class UTable:
    """u_rs for 1 <= r, s <= s_max; values[r-1, s-1], zero below the diagonal."""
    s_max: int
    values: np.ndarray

    def u(self, r: int, s: int) -> float:
        if r < 1 or s < 1:
            raise BadIndex(f"u({r}, {s}): indices start at 1")
        if r > self.s_max or s > self.s_max:
            raise BadIndex(f"u({r}, {s}) outside table of size {self.s_max}")
        return float(self.values[r - 1, s - 1])

    def row_sum(self, r: int) -> float:
        return float(self.values[r - 1].sum())

    def tail_mass(self, r: int) -> float:
        """Mass of row r beyond s_max."""
        return max(0.0, 1.0 - self.row_sum(r))

    def tail_masses(self) -> np.ndarray:
        return np.clip(1.0 - self.values.sum(axis=1), 0.0, None)
