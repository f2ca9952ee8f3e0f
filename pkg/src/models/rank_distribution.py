"""Expected rank distribution matrix D(p, s)."""
from enum import Enum
from pathlib import Path
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

from src.models.mechanism import Mechanism


class Provenance(str, Enum):
    """Where a matrix came from"""
    EXACT = "exact"              # closed form
    BRUTE_FORCE = "brute_force"  # exhaustive enumeration
    ESTIMATED = "estimated"      # Monte Carlo


class RankDistribution(BaseModel):
    """
    D(p, s) = P(agent at position p obtains rank s).

    Rows are indexed by `positions` (1-based, increasing). Columns are ranks
    1..width; when width < n the remaining mass of each row sits in `overflow`.
    A full matrix has positions 1..n and width n.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    n: int = Field(ge=1)
    mechanism: Mechanism
    provenance: Provenance
    positions: List[int]
    probabilities: np.ndarray
    overflow: Optional[np.ndarray] = None
    trials: Optional[int] = None
    seed: Optional[int] = None

    @field_validator("probabilities", "overflow", mode="before")
    @classmethod
    def _as_array(cls, value):
        if value is None:
            return None
        return np.asarray(value, dtype=float)

    @field_serializer("probabilities", "overflow")
    def _dump_array(self, value: Optional[np.ndarray]):
        return None if value is None else value.tolist()

    @model_validator(mode="after")
    def _check_shape(self) -> "RankDistribution":
        if self.probabilities.ndim != 2 or self.probabilities.shape[0] != len(self.positions):
            raise ValueError(
                f"probabilities shape {self.probabilities.shape} does not match "
                f"{len(self.positions)} positions"
            )
        if self.probabilities.shape[1] > self.n:
            raise ValueError(f"width {self.probabilities.shape[1]} exceeds n={self.n}")
        if any(p < 1 or p > self.n for p in self.positions):
            raise ValueError(f"positions must lie in 1..{self.n}")
        if list(self.positions) != sorted(set(self.positions)):
            raise ValueError("positions must be strictly increasing")
        if self.overflow is None:
            self.overflow = np.zeros(len(self.positions))
        return self

    @property
    def width(self) -> int:
        return self.probabilities.shape[1]

    @property
    def is_full(self) -> bool:
        return self.width == self.n and self.positions == list(range(1, self.n + 1))

    @property
    def is_estimated(self) -> bool:
        return self.provenance == Provenance.ESTIMATED

    def row(self, position: int) -> np.ndarray:
        """Row for 1-based position p."""
        try:
            return self.probabilities[self.positions.index(position)]
        except ValueError:
            raise KeyError(f"position {position} not in matrix") from None

    def cell(self, position: int, rank: int) -> float:
        if rank > self.width:
            return 0.0 if self.is_full else float("nan")
        return float(self.row(position)[rank - 1])

    def row_sums(self) -> np.ndarray:
        return self.probabilities.sum(axis=1) + self.overflow

    def cumulative(self) -> np.ndarray:
        """Row-wise P(S <= s) for s = 1..width."""
        return np.cumsum(self.probabilities, axis=1)

    def standard_errors(self) -> np.ndarray:
        """Binomial standard error per cell; zeros for non-estimated matrices."""
        if not self.is_estimated or not self.trials:
            return np.zeros_like(self.probabilities)
        p = self.probabilities
        return np.sqrt(p * (1.0 - p) / self.trials)

    def save(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            f.write(self.model_dump_json(indent=2))

    @classmethod
    def load(cls, path: Path) -> "RankDistribution":
        with open(path) as f:
            return cls.model_validate_json(f.read())
