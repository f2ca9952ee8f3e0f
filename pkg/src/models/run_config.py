"""Validated configuration of one CLI run."""
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import yaml
from pydantic import BaseModel, Field, field_validator, model_validator

from src.models.mechanism import Mechanism
from src.models.scoring_rule import ScoringRule
from src.utils.config import config
from src.utils.errors import ConfigError

Subcommand = Literal["limits", "figure", "simulate", "converge"]
OutputFormat = Literal["csv", "json"]

# Fields that change how a run executes but not what it computes
_EXECUTION_ONLY = {"threads", "output", "allow_large"}


class RunConfig(BaseModel):
    """
    Everything a subcommand needs, validated before execution.

    The provenance block written into every result file is this model
    minus the execution-only fields, so output is identical for any
    thread count.
    """

    subcommand: Subcommand
    mechanisms: List[Mechanism] = Field(default_factory=lambda: list(Mechanism))
    n: List[int] = Field(default_factory=lambda: [1000])
    trials: int = Field(default=100, ge=1)
    seed: int = Field(default_factory=lambda: config.default_seed, ge=0, lt=2**64)
    theta_grid: List[float] = Field(default_factory=list)
    rule: str = "k1"
    k: List[int] = Field(default_factory=lambda: [1, 2, 3])
    rounds: List[int] = Field(default_factory=lambda: [1, 2, 3, 4])
    ranks: List[int] = Field(default_factory=lambda: [1, 2, 3, 4])
    s_max: int = Field(default_factory=lambda: config.s_max, ge=1)
    r_max: int = Field(default_factory=lambda: config.r_max, ge=1)
    table: Optional[int] = Field(default=None, ge=1, le=4)
    figure: Optional[int] = Field(default=None, ge=1, le=6)
    statistic: str = "survivors"
    positions: Literal["all", "extremes"] = "all"
    output: Optional[Path] = None
    format: OutputFormat = "csv"
    threads: int = Field(default_factory=lambda: config.threads, ge=1)
    allow_large: bool = False

    @field_validator("n")
    @classmethod
    def _positive_sizes(cls, v: List[int]) -> List[int]:
        if not v or any(size < 1 for size in v):
            raise ValueError(f"n values must be >= 1, got {v}")
        return v

    @field_validator("k", "rounds", "ranks")
    @classmethod
    def _positive_indices(cls, v: List[int]) -> List[int]:
        if any(i < 1 for i in v):
            raise ValueError(f"indices must be >= 1, got {v}")
        return v

    @field_validator("theta_grid")
    @classmethod
    def _sorted_unit_grid(cls, v: List[float]) -> List[float]:
        if any(not 0.0 <= t <= 1.0 for t in v):
            raise ValueError(f"theta values must lie in [0, 1], got {v}")
        if v != sorted(v):
            raise ValueError("theta grid must be sorted")
        return v

    @field_validator("rule")
    @classmethod
    def _known_rule(cls, v: str) -> str:
        ScoringRule.parse(v)
        return v

    @field_validator("statistic")
    @classmethod
    def _known_statistic(cls, v: str) -> str:
        if v not in ("survivors", "welfare", "last_agent"):
            raise ValueError(f"unknown statistic {v!r}")
        return v

    @model_validator(mode="after")
    def _subcommand_requirements(self) -> "RunConfig":
        if self.subcommand == "limits" and self.table is None:
            raise ValueError("limits needs --table")
        if self.subcommand == "figure" and self.figure is None:
            raise ValueError("figure needs --figure")
        return self

    @property
    def scoring_rule(self) -> ScoringRule:
        return ScoringRule.parse(self.rule)

    def provenance(self) -> Dict[str, Any]:
        """Config block embedded in result files."""
        from src import __version__

        data = self.model_dump(mode="json", exclude=_EXECUTION_ONLY)
        return {"allocsim_version": __version__, **data}

    @classmethod
    def from_yaml(cls, path: Path, defaults: Optional[Dict[str, Any]] = None,
                  **overrides: Any) -> "RunConfig":
        """
        Load a run config file. Explicit overrides win over file values,
        which win over `defaults`; None values are ignored throughout.
        """
        with open(path) as f:
            data = yaml.safe_load(f) or {}
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a mapping at top level")
        merged = {key: value for key, value in (defaults or {}).items() if value is not None}
        merged.update(data)
        merged.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**merged)
