"""Mechanism tags and random-number provenance."""
from enum import Enum

from pydantic import BaseModel, Field

from src.utils.random_stream import PCG32, agent_stream, derive_trial_seed


class Mechanism(str, Enum):
    """Housing-allocation mechanisms"""
    SD = "sd"   # Serial Dictatorship
    NB = "nb"   # Naive Boston
    AB = "ab"   # Adaptive Boston

    @property
    def label(self) -> str:
        return {
            Mechanism.SD: "Serial Dictatorship",
            Mechanism.NB: "Naive Boston",
            Mechanism.AB: "Adaptive Boston",
        }[self]


class RngSpec(BaseModel):
    """
    Seed provenance for one trial.

    Same (master_seed, trial_index, n, mechanism) always reproduces the same
    outcome record, bit for bit.
    """

    model_config = {"frozen": True}

    master_seed: int = Field(ge=0, lt=2**64)
    trial_index: int = Field(default=0, ge=0)

    def trial_seed(self) -> int:
        return derive_trial_seed(self.master_seed, self.trial_index)

    def stream(self, agent_index: int) -> PCG32:
        """Independent stream for agent `agent_index` (0-based)."""
        return agent_stream(self.trial_seed(), agent_index)

    def for_trial(self, trial_index: int) -> "RngSpec":
        return RngSpec(master_seed=self.master_seed, trial_index=trial_index)
