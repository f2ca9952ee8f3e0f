"""Independent trials, run serially or across worker processes.

Each trial t uses RngSpec(master_seed, t), so its outcome does not depend on
which worker runs it. Batches come back in trial order and every aggregate
is reduced in that order, which makes results identical for any worker
count.
"""
import concurrent.futures
import multiprocessing
import os
from concurrent.futures.process import BrokenProcessPool
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from src.mechanisms.engine import run_mechanism
from src.models.mechanism import Mechanism, RngSpec
from src.models.outcome import segment_size
from src.models.scoring_rule import ScoringRule
from src.utils.config import config
from src.utils.logger import setup_logger

# Batches per worker; more batches smooth out uneven trial lengths
BATCHES_PER_WORKER = 4


@dataclass(frozen=True)
class TrialJob:
    """What to run and which per-trial statistics to keep."""
    mechanism: Mechanism
    n: int
    master_seed: int
    positions: Optional[Sequence[int]] = None  # 1-based; None keeps every position
    rounds: Sequence[int] = (1, 2, 3, 4)
    theta_grid: Sequence[float] = (1.0,)
    rule: Optional[ScoringRule] = None

    def kept_positions(self) -> List[int]:
        return list(range(1, self.n + 1)) if self.positions is None else list(self.positions)


@dataclass
class TrialBatch:
    """Per-trial statistics for trials first_trial .. first_trial + len - 1."""
    first_trial: int
    ranks: np.ndarray          # (trials, positions) rank obtained
    exit_rounds: np.ndarray    # (trials, positions)
    survivors: np.ndarray      # (trials, rounds, theta) N_n(r, theta)
    welfare: np.ndarray        # (trials, theta) raw W_n(theta), zeros without a rule
    rounds_used: np.ndarray    # (trials,)


@dataclass
class TrialResults:
    """All batches of a job, concatenated in trial order."""
    job: TrialJob
    ranks: np.ndarray
    exit_rounds: np.ndarray
    survivors: np.ndarray
    welfare: np.ndarray
    rounds_used: np.ndarray
    workers_used: int = 1
    notes: List[str] = field(default_factory=list)

    @property
    def trials(self) -> int:
        return self.ranks.shape[0]

    def mean_survivor_fraction(self) -> np.ndarray:
        """(rounds, theta) mean of N_n(r, theta) / n over trials."""
        return self.survivors.sum(axis=0) / (self.trials * self.job.n)

    def mean_welfare(self) -> np.ndarray:
        return self.welfare.sum(axis=0) / (self.trials * self.job.n)


def run_trial_batch(job: TrialJob, first_trial: int, count: int) -> TrialBatch:
    """Run `count` consecutive trials of `job` in this process."""
    positions = np.asarray(job.kept_positions(), dtype=np.int64) - 1
    cutoffs = np.asarray([segment_size(job.n, t) for t in job.theta_grid], dtype=np.int64)
    sigma = job.rule.materialize(job.n) if job.rule is not None else None

    ranks = np.zeros((count, len(positions)), dtype=np.int32)
    exits = np.zeros((count, len(positions)), dtype=np.int32)
    survivors = np.zeros((count, len(job.rounds), len(cutoffs)), dtype=np.int64)
    welfare = np.zeros((count, len(cutoffs)))
    rounds_used = np.zeros(count, dtype=np.int32)

    for i in range(count):
        rng = RngSpec(master_seed=job.master_seed, trial_index=first_trial + i)
        assignment = run_mechanism(job.mechanism, job.n, rng)
        all_ranks = np.fromiter((r.rank_obtained for r in assignment.records), np.int64, job.n)
        all_exits = np.fromiter((r.exit_round for r in assignment.records), np.int64, job.n)

        ranks[i] = all_ranks[positions]
        exits[i] = all_exits[positions]
        rounds_used[i] = all_exits.max()
        for ri, r in enumerate(job.rounds):
            alive = np.concatenate([[0], np.cumsum(all_exits >= r)])
            survivors[i, ri] = alive[cutoffs]
        if sigma is not None:
            utility = np.concatenate([[0.0], np.cumsum(sigma[all_ranks - 1])])
            welfare[i] = utility[cutoffs]

    return TrialBatch(first_trial, ranks, exits, survivors, welfare, rounds_used)


def _default_start_method() -> str:
    methods = multiprocessing.get_all_start_methods()
    if os.name == "posix" and "fork" in methods:
        return "fork"
    return "spawn" if "spawn" in methods else methods[0]


class TrialRunner:
    """
    Runs independent trials with a configurable number of worker processes.

    Usage:
        runner = TrialRunner(threads=4)
        results = runner.run(TrialJob(Mechanism.NB, n=10_000, master_seed=7), trials=200)
    """

    def __init__(self, threads: Optional[int] = None):
        self.threads = threads or config.threads
        self.logger = setup_logger("TrialRunner")

    def _plan(self, trials: int) -> List[tuple]:
        workers = max(1, min(self.threads, trials))
        batches = 1 if workers == 1 else min(trials, workers * BATCHES_PER_WORKER)
        size, extra = divmod(trials, batches)
        plan, start = [], 0
        for b in range(batches):
            count = size + (1 if b < extra else 0)
            plan.append((start, count))
            start += count
        return plan

    def _run_serial(self, job: TrialJob, plan: List[tuple]) -> List[TrialBatch]:
        return [run_trial_batch(job, start, count) for start, count in plan]

    def _run_parallel(self, job: TrialJob, plan: List[tuple], workers: int) -> List[TrialBatch]:
        results = {}
        context = multiprocessing.get_context(_default_start_method())
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers, mp_context=context) as executor:
            futures = {
                executor.submit(run_trial_batch, job, start, count): start
                for start, count in plan
            }
            for future in concurrent.futures.as_completed(futures):
                batch = future.result()
                results[batch.first_trial] = batch
        return [results[start] for start in sorted(results)]

    def run(self, job: TrialJob, trials: int) -> TrialResults:
        if trials < 1:
            raise ValueError(f"trials must be >= 1, got {trials}")
        plan = self._plan(trials)
        workers = max(1, min(self.threads, len(plan)))
        notes: List[str] = []

        self.logger.info(
            f"Running {trials} {job.mechanism.value} trials at n={job.n} "
            f"({len(plan)} batches, {workers} workers)"
        )
        if workers == 1:
            batches = self._run_serial(job, plan)
        else:
            try:
                batches = self._run_parallel(job, plan, workers)
            except (BrokenProcessPool, OSError) as e:
                self.logger.warning(f"Worker pool failed ({e}); running serially")
                notes.append(f"serial fallback: {e}")
                workers = 1
                batches = self._run_serial(job, plan)

        return TrialResults(
            job=job,
            ranks=np.concatenate([b.ranks for b in batches]),
            exit_rounds=np.concatenate([b.exit_rounds for b in batches]),
            survivors=np.concatenate([b.survivors for b in batches]),
            welfare=np.concatenate([b.welfare for b in batches]),
            rounds_used=np.concatenate([b.rounds_used for b in batches]),
            workers_used=workers,
            notes=notes,
        )
