from .mechanism import Mechanism, RngSpec
from .outcome import Bid, OutcomeRecord, Assignment, RankCount, RoundTrace
from .rank_distribution import RankDistribution, Provenance
from .scoring_rule import ScoringRule, WelfareCurve
from .limit_state import NaiveLimitState, AdaptiveLimitState, UTable
from .run_config import RunConfig
from .result_table import ResultTable

__all__ = [
    # Mechanisms
    "Mechanism",
    "RngSpec",
    # Outcomes
    "Bid",
    "OutcomeRecord",
    "Assignment",
    "RankCount",
    "RoundTrace",
    # Rank distributions
    "RankDistribution",
    "Provenance",
    # Scoring
    "ScoringRule",
    "WelfareCurve",
    # Limits
    "NaiveLimitState",
    "AdaptiveLimitState",
    "UTable",
    # CLI
    "RunConfig",
    "ResultTable",
]
