"""Positional scoring rules and welfare curves."""
import re
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from src.models.mechanism import Mechanism
from src.utils.errors import NoLimitRule

RuleKind = Literal["k_approval", "borda", "custom"]


def _check_scores(values: List[float], label: str) -> None:
    previous = 1.0
    for s, value in enumerate(values, start=1):
        if not 0.0 <= value <= previous:
            raise ValueError(
                f"{label} must be nonincreasing in [0, 1]; entry {s} is {value}"
            )
        previous = value


class ScoringRule(BaseModel):
    """
    A rank-utility vector sigma_n(1..n), nonincreasing in [0, 1].

    k_approval  sigma_n(s) = 1 for s <= k else 0, limit lambda_s = 1{s <= k}
    borda       sigma_n(s) = (n - s) / (n - 1), limit lambda_s = 1
    custom      `scores` is used for ranks 1..len(scores) and its last value
                repeats beyond. `limit_weights` must be declared to take limits.
    """

    model_config = {"frozen": True}

    kind: RuleKind
    k: Optional[int] = Field(default=None, ge=1)
    scores: Optional[List[float]] = None
    limit_weights: Optional[List[float]] = None

    @model_validator(mode="after")
    def _check_kind(self) -> "ScoringRule":
        if self.kind == "k_approval" and self.k is None:
            raise ValueError("k_approval rule needs k")
        if self.kind == "custom":
            if not self.scores:
                raise ValueError("custom rule needs a score vector")
            _check_scores(self.scores, "scores")
        if self.limit_weights is not None:
            _check_scores(self.limit_weights, "limit_weights")
        return self

    # ==================== Constructors ====================

    @classmethod
    def k_approval(cls, k: int) -> "ScoringRule":
        return cls(kind="k_approval", k=k)

    @classmethod
    def borda(cls) -> "ScoringRule":
        return cls(kind="borda")

    @classmethod
    def custom(cls, scores: List[float], limit_weights: Optional[List[float]] = None) -> "ScoringRule":
        return cls(kind="custom", scores=list(scores), limit_weights=limit_weights)

    @classmethod
    def parse(cls, text: str) -> "ScoringRule":
        """
        Parse a rule name as written on the command line.

        Accepts "borda", "k3", "3-approval", "approval:3" and
        "custom:1,0.5,0". A custom vector written out this way does not
        depend on n, so it is also its own limit.
        """
        value = text.strip().lower()
        if value == "borda":
            return cls.borda()
        if value.startswith("custom:"):
            try:
                scores = [float(x) for x in value[len("custom:"):].split(",") if x.strip()]
            except ValueError:
                raise ValueError(f"custom scores must be numbers: {text!r}") from None
            return cls.custom(scores, limit_weights=scores)
        match = re.fullmatch(r"(?:k|approval:)(\d+)|(\d+)-approval", value)
        if match:
            return cls.k_approval(int(match.group(1) or match.group(2)))
        raise ValueError(f"unknown scoring rule: {text!r}")

    # ==================== Evaluation ====================

    @property
    def label(self) -> str:
        if self.kind == "k_approval":
            return f"{self.k}-approval"
        return self.kind

    def materialize(self, n: int) -> np.ndarray:
        """sigma_n(1..n) as an array of length n."""
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        ranks = np.arange(1, n + 1)
        if self.kind == "k_approval":
            return (ranks <= self.k).astype(float)
        if self.kind == "borda":
            if n == 1:
                return np.ones(1)
            return (n - ranks) / (n - 1)
        scores = np.asarray(self.scores, dtype=float)
        if n <= len(scores):
            return scores[:n].copy()
        return np.concatenate([scores, np.full(n - len(scores), scores[-1])])

    def limit_vector(self, s_max: int) -> np.ndarray:
        """lambda_1..lambda_{s_max}, the limits of sigma_n(s) as n grows."""
        ranks = np.arange(1, s_max + 1)
        if self.kind == "k_approval":
            return (ranks <= self.k).astype(float)
        if self.kind == "borda":
            return np.ones(s_max)
        if self.limit_weights is None:
            raise NoLimitRule(f"custom rule {self.scores} declares no limit weights")
        weights = np.asarray(self.limit_weights, dtype=float)
        if s_max <= len(weights):
            return weights[:s_max].copy()
        return np.concatenate([weights, np.full(s_max - len(weights), weights[-1])])

    def limit_tail_weight(self) -> float:
        """lambda_s for s beyond any finite truncation."""
        if self.kind == "k_approval":
            return 0.0
        if self.kind == "borda":
            return 1.0
        if self.limit_weights is None:
            raise NoLimitRule(f"custom rule {self.scores} declares no limit weights")
        return float(self.limit_weights[-1])


class WelfareCurve(BaseModel):
    """W(theta)/n over a theta grid, either empirical or limiting."""

    mechanism: Mechanism
    rule: str
    source: Literal["empirical", "limit"]
    theta_grid: List[float]
    values: List[float]
    n: Optional[int] = None
    trials: Optional[int] = None
    s_max: Optional[int] = None
    tail_mass: Optional[List[float]] = None  # limit curves only

    @model_validator(mode="after")
    def _check_lengths(self) -> "WelfareCurve":
        if len(self.values) != len(self.theta_grid):
            raise ValueError("values and theta_grid differ in length")
        return self

    def at(self, theta: float) -> float:
        return self.values[self.theta_grid.index(theta)]

    def is_nondecreasing(self, tol: float = 0.0) -> bool:
        return all(b >= a - tol for a, b in zip(self.values, self.values[1:]))
