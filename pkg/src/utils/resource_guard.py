"""Workload guardrails for simulations and exact oracles.

Blocks requests that would run for hours by accident: very large
n * trials products for Monte Carlo runs, and exhaustive enumeration
beyond the sizes it can handle.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from src.utils.errors import OracleTooLarge, ResourceLimitExceeded
from src.utils.logger import setup_logger


class WorkloadLevel(Enum):
    """Severity of a workload check."""
    OK = "ok"
    WARNING = "warning"
    BLOCKED = "blocked"


@dataclass
class WorkloadCheck:
    """Result of a workload check."""
    allowed: bool
    level: WorkloadLevel
    reason: Optional[str] = None
    workload: int = 0


class ResourceGuard:
    """
    Checks requested workloads against the configured caps.

    Usage:
        from src.utils.resource_guard import resource_guard

        check = resource_guard.check_workload(n=10_000, trials=200)
        if not check.allowed:
            raise ResourceLimitExceeded(check.reason)
    """

    # Exhaustive oracles grow super-exponentially in n
    MAX_ORACLE_N = 6
    MAX_PROFILE_ENUMERATION_N = 3

    # Fraction of the cap above which we warn
    WARNING_FRACTION = 0.25

    def __init__(self, max_workload: Optional[int] = None):
        if max_workload is None:
            from src.utils.config import config
            max_workload = config.max_workload
        self.max_workload = max_workload
        self.logger = setup_logger("ResourceGuard")

    def check_workload(self, n: int, trials: int, allow_large: bool = False) -> WorkloadCheck:
        """Check an n * trials simulation request."""
        workload = n * trials

        if workload > self.max_workload and not allow_large:
            return WorkloadCheck(
                allowed=False,
                level=WorkloadLevel.BLOCKED,
                reason=(
                    f"n*trials = {workload:,} exceeds cap {self.max_workload:,} "
                    f"(pass --allow-large to override)"
                ),
                workload=workload,
            )

        if workload > self.max_workload * self.WARNING_FRACTION:
            self.logger.warning(f"Large workload: n*trials = {workload:,}")
            return WorkloadCheck(allowed=True, level=WorkloadLevel.WARNING, workload=workload)

        return WorkloadCheck(allowed=True, level=WorkloadLevel.OK, workload=workload)

    def require_workload(self, n: int, trials: int, allow_large: bool = False) -> WorkloadCheck:
        """check_workload, raising ResourceLimitExceeded when blocked."""
        check = self.check_workload(n, trials, allow_large)
        if not check.allowed:
            raise ResourceLimitExceeded(check.reason)
        return check

    def check_oracle(self, n: int, exhaustive_profiles: bool = False) -> None:
        """Raise OracleTooLarge when exact enumeration would not finish."""
        limit = self.MAX_PROFILE_ENUMERATION_N if exhaustive_profiles else self.MAX_ORACLE_N
        if n > limit:
            raise OracleTooLarge(f"exact oracle supports n <= {limit}, got n={n}")


# Global instance
resource_guard = ResourceGuard()
