"""Shared utilities."""
from .config import config, Config
from .logger import setup_logger, StageLogger
from .resource_guard import resource_guard, ResourceGuard, WorkloadCheck, WorkloadLevel
from .run_log import RunLog, OutputEntry, RunSummary, payload_digest
from .random_stream import PCG32, agent_stream, derive_trial_seed

__all__ = [
    "config",
    "Config",
    "setup_logger",
    "StageLogger",
    # Resource limits
    "resource_guard",
    "ResourceGuard",
    "WorkloadCheck",
    "WorkloadLevel",
    # Run log
    "RunLog",
    "OutputEntry",
    "RunSummary",
    "payload_digest",
    # Random streams
    "PCG32",
    "agent_stream",
    "derive_trial_seed",
]
