"""Exception hierarchy for allocsim.

Everything raised on purpose by the library derives from AllocSimError so
callers (and the CLI) can tell library failures from bugs. Errors that
describe a bad argument also derive from ValueError.
"""


class AllocSimError(Exception):
    """Base class for all allocsim errors."""


class ConfigError(AllocSimError, ValueError):
    """Invalid run configuration (maps to CLI exit code 2)."""


# =========================================================================
# PREFERENCES
# =========================================================================

class ExhaustedPreferences(AllocSimError):
    """Every item has already been revealed for this agent."""


class NoAvailableItem(AllocSimError):
    """No item of the requested available set is still unrevealed."""


# =========================================================================
# MECHANISMS
# =========================================================================

class EmptyInstance(AllocSimError, ValueError):
    """An allocation instance needs at least one agent."""


class UnequalInstance(AllocSimError, ValueError):
    """Agent and item counts differ."""


class BadThetaGrid(AllocSimError, ValueError):
    """Theta grid is unsorted or has values outside [0, 1]."""


class OracleTooLarge(AllocSimError, ValueError):
    """Exact enumeration requested for an instance that is too big."""


class InvalidAssignment(AllocSimError, ValueError):
    """Outcome records break the matching or the rank rules of their mechanism."""


# =========================================================================
# LIMITS
# =========================================================================

class BadIndex(AllocSimError, ValueError):
    """Round or rank index out of range."""


class BadTheta(AllocSimError, ValueError):
    """Relative position outside [0, 1]."""


class BadUrnSpec(AllocSimError, ValueError):
    """Urn ball counts are not strictly decreasing and positive."""


class BadProb(AllocSimError, ValueError):
    """Geometric success probability outside (0, 1]."""


class QuadratureFailure(AllocSimError):
    """Numerical integration did not reach the requested tolerance."""


# =========================================================================
# WELFARE / BIAS
# =========================================================================

class NoLimitRule(AllocSimError, ValueError):
    """Scoring rule has no declared limit weights."""


class DegenerateRule(AllocSimError, ValueError):
    """Scoring rule gives the same utility to the best and worst rank."""


# =========================================================================
# RUNTIME
# =========================================================================

class ResourceLimitExceeded(AllocSimError):
    """Requested workload is above the configured cap."""
