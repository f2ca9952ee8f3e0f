"""Expected rank distribution matrices: exact for SD, Monte Carlo for any mechanism."""
from typing import Optional, Sequence, Union

import numpy as np
from scipy.special import gammaln

from src.mechanisms.trial_runner import TrialJob, TrialResults, TrialRunner
from src.models.mechanism import Mechanism, RngSpec
from src.models.rank_distribution import Provenance, RankDistribution
from src.utils.config import config
from src.utils.errors import BadIndex, EmptyInstance
from src.utils.logger import setup_logger

logger = setup_logger("RankMatrix")


def _log_binomial(a, b):
    return gammaln(a + 1) - gammaln(b + 1) - gammaln(a - b + 1)


def sd_rank_probability(n: int, k: int, s: int) -> float:
    """P(the k-th agent under SD gets their s-th choice) = C(n-s, k-s) / C(n, k-1)."""
    if n < 1:
        raise EmptyInstance(f"need at least one agent, got n={n}")
    if not 1 <= k <= n or s < 1:
        raise BadIndex(f"need 1 <= k <= n and s >= 1, got n={n}, k={k}, s={s}")
    if s > k:
        return 0.0
    return float(np.exp(_log_binomial(n - s, k - s) - _log_binomial(n, k - 1)))


def sd_exact_matrix(n: int) -> RankDistribution:
    """Full n x n SD matrix from the binomial-ratio formula, in log-gamma space."""
    if n < 1:
        raise EmptyInstance(f"need at least one agent, got n={n}")
    k = np.arange(1, n + 1, dtype=float)[:, None]
    s = np.arange(1, n + 1, dtype=float)[None, :]
    feasible = s <= k
    # masked-out cells (s > k) use k - s -> 0 so gammaln stays finite
    log_p = _log_binomial(n - s, np.where(feasible, k - s, 0.0)) - _log_binomial(n, k - 1)
    matrix = np.where(feasible, np.exp(log_p), 0.0)
    return RankDistribution(
        n=n,
        mechanism=Mechanism.SD,
        provenance=Provenance.EXACT,
        positions=list(range(1, n + 1)),
        probabilities=matrix,
    )


def _as_rng(rng: Union[RngSpec, int, None]) -> RngSpec:
    if rng is None:
        return RngSpec(master_seed=config.default_seed)
    if isinstance(rng, RngSpec):
        return rng
    return RngSpec(master_seed=int(rng))


def distribution_from_results(results: TrialResults, s_max: Optional[int] = None) -> RankDistribution:
    """
    Frequency matrix of the ranks kept in `results`.

    Ranks above `s_max` (default: config.s_max, never more than n) are
    pooled in the overflow column.
    """
    job = results.job
    width = min(job.n, config.s_max if s_max is None else s_max)
    kept = job.kept_positions()
    counts = np.zeros((len(kept), width + 1), dtype=np.int64)
    for column in range(len(kept)):
        ranks = np.minimum(results.ranks[:, column], width + 1)
        counts[column] = np.bincount(ranks, minlength=width + 2)[1:]

    trials = results.trials
    return RankDistribution(
        n=job.n,
        mechanism=job.mechanism,
        provenance=Provenance.ESTIMATED,
        positions=kept,
        probabilities=counts[:, :width] / trials,
        overflow=counts[:, width] / trials,
        trials=trials,
        seed=job.master_seed,
    )


def estimate_matrix(
    mechanism: Mechanism,
    n: int,
    trials: int,
    rng: Union[RngSpec, int, None] = None,
    positions: Optional[Sequence[int]] = None,
    s_max: Optional[int] = None,
    threads: Optional[int] = None,
) -> RankDistribution:
    """
    Monte Carlo D(p, s): frequency of rank s at position p over `trials` runs.

    Only `positions` (default: all) are kept and ranks above `s_max`
    (default: config.s_max, capped at n) are pooled in the overflow column.
    Trial t of the estimate uses RngSpec(rng.master_seed, t).
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    spec = _as_rng(rng)
    job = TrialJob(
        mechanism=Mechanism(mechanism),
        n=n,
        master_seed=spec.master_seed,
        positions=None if positions is None else sorted(set(positions)),
        rounds=(1,),
    )
    results = TrialRunner(threads).run(job, trials)
    logger.debug(f"Estimated {job.mechanism.value} matrix n={n} over {trials} trials")
    return distribution_from_results(results, s_max)


def last_agent_distribution(
    mechanism: Mechanism,
    n: int,
    trials: int,
    rng: Union[RngSpec, int, None] = None,
    s_max: Optional[int] = None,
    threads: Optional[int] = None,
) -> np.ndarray:
    """Estimated rank distribution of the agent at position n (first `s_max` ranks)."""
    matrix = estimate_matrix(mechanism, n, trials, rng, positions=[n], s_max=s_max, threads=threads)
    return matrix.row(n)
