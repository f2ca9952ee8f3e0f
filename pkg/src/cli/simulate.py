#!/usr/bin/env python3
"""CLI entry point for Monte Carlo runs compared against their limits."""
import math
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

# Add src to path if running as script
if __name__ == "__main__":
    src_path = Path(__file__).parent.parent.parent
    sys.path.insert(0, str(src_path))

import numpy as np

from src.bias.order_bias import order_bias_report
from src.bias.rank_matrix import distribution_from_results
from src.cli.common import (
    add_simulation_arguments,
    build_run_config,
    int_list,
    make_parser,
    mechanism_list,
    run_command,
    status,
    theta_list,
)
from src.limits.rank_limits import (
    group_limits,
    order_bias_limit,
    q_vector,
    survivor_fraction,
    unmatched_after,
)
from src.mechanisms.engine import run_with_trace
from src.mechanisms.trial_runner import TrialJob, TrialResults, TrialRunner
from src.models.mechanism import Mechanism, RngSpec
from src.models.result_table import ResultTable
from src.models.run_config import RunConfig
from src.models.scoring_rule import WelfareCurve
from src.utils.config import config
from src.utils.errors import DegenerateRule, NoLimitRule
from src.utils.logger import StageLogger, setup_logger
from src.utils.resource_guard import resource_guard
from src.welfare.welfare import empirical_welfare_curve, welfare_limit_curve

logger = setup_logger("SimulateCommand")


def theta_grid_for(run_config: RunConfig) -> List[float]:
    """Requested grid (default 0:1:0.05), always including theta = 1."""
    grid = run_config.theta_grid or config.default_theta_grid()
    return sorted(set(grid) | {1.0})


def make_job(run_config: RunConfig, mechanism: Mechanism, n: int) -> TrialJob:
    """
    Survivor counts are kept for every round up to max(r_max, rounds) + 1
    so exit-round frequencies and "unmatched after R rounds" come out of
    the same counts.
    """
    deepest = max(run_config.r_max, max(run_config.rounds)) + 1
    return TrialJob(
        mechanism=mechanism,
        n=n,
        master_seed=run_config.seed,
        positions=None if run_config.positions == "all" else sorted({1, n}),
        rounds=tuple(range(1, deepest + 1)),
        theta_grid=tuple(theta_grid_for(run_config)),
        rule=run_config.scoring_rule,
    )


def _standard_error(samples: np.ndarray) -> Optional[float]:
    if len(samples) < 2:
        return None
    return float(samples.std(ddof=1) / math.sqrt(len(samples)))


class SimulationReport:
    """
    Collects the tables of one simulate run, one mechanism and size at a time.

    Usage:
        report = SimulationReport(run_config)
        report.add_results(results)
        report.add_trace(Mechanism.AB, 1000)
        tables = report.tables()
    """

    def __init__(self, run_config: RunConfig):
        self.run_config = run_config
        self.rule = run_config.scoring_rule
        self.grid = theta_grid_for(run_config)
        self.logger = setup_logger("SimulationReport")
        self._welfare_limits: Dict[Mechanism, Optional[WelfareCurve]] = {}

        self.summary = ResultTable(name="summary", columns=[
            "mechanism", "n", "trials", "mean_rounds_used", "max_rounds_used",
            "after_rounds", "unmatched", "unmatched_limit", "welfare", "welfare_limit",
        ])
        self.trials = ResultTable(name="trials", columns=[
            "mechanism", "n", "trial", "rounds_used", "unmatched", "welfare",
        ])
        self.survivors = ResultTable(name="survivors", columns=[
            "mechanism", "n", "r", "theta", "empirical", "std_error", "limit",
        ])
        self.exit_rounds = ResultTable(name="exit_rounds", columns=[
            "mechanism", "n", "r", "empirical", "limit",
        ])
        self.ranks = ResultTable(name="ranks", columns=[
            "mechanism", "n", "position", "theta", "rank", "frequency", "limit", "overflow",
        ])
        self.welfare = ResultTable(name="welfare", columns=[
            "mechanism", "n", "rule", "theta", "empirical", "limit", "tail_mass",
        ])
        self.bias = ResultTable(name="bias", columns=[
            "mechanism", "n", "rule", "max_form", "extreme_form", "std_error",
            "interval_low", "interval_high", "disagreement", "limit",
        ])
        self.trace = ResultTable(name="trace", columns=[
            "mechanism", "n", "r", "s", "theta", "bids", "unsuccessful", "successful",
            "bids_limit", "unsuccessful_limit", "successful_limit",
        ])

    def tables(self) -> List[ResultTable]:
        return [
            self.summary, self.trials, self.survivors, self.exit_rounds,
            self.ranks, self.welfare, self.bias, self.trace,
        ]

    def _welfare_limit(self, mechanism: Mechanism) -> Optional[WelfareCurve]:
        if mechanism not in self._welfare_limits:
            try:
                curve = welfare_limit_curve(mechanism, self.rule, self.grid, self.run_config.s_max)
            except NoLimitRule as e:
                self.logger.warning(f"No welfare limit: {e}")
                curve = None
            self._welfare_limits[mechanism] = curve
        return self._welfare_limits[mechanism]

    def add_results(self, results: TrialResults) -> None:
        job = results.job
        m, n = job.mechanism, job.n
        rounds = {r: i for i, r in enumerate(job.rounds)}
        top = self.grid.index(1.0)
        after = max(self.run_config.rounds)

        # N_n(r, 1) per trial
        remaining = results.survivors[:, :, top]
        unmatched = remaining[:, rounds[after + 1]] / n
        welfare = results.welfare[:, top] / n
        limit_curve = self._welfare_limit(m)

        self.summary.add_row(
            m.value, n, results.trials,
            float(results.rounds_used.mean()), int(results.rounds_used.max()),
            after, float(unmatched.mean()), unmatched_after(m, after),
            float(welfare.mean()), limit_curve.values[top] if limit_curve else None,
        )
        # Tables must not depend on the worker count
        self.logger.info(f"{m.value} n={n}: {results.trials} trials on {results.workers_used} worker(s)")
        for note in results.notes:
            self.logger.warning(f"{m.value} n={n}: {note}")
        for t in range(results.trials):
            self.trials.add_row(
                m.value, n, t, int(results.rounds_used[t]), float(unmatched[t]), float(welfare[t])
            )

        mean = results.mean_survivor_fraction()
        for r in self.run_config.rounds:
            for j, theta in enumerate(self.grid):
                samples = results.survivors[:, rounds[r], j] / n
                self.survivors.add_row(
                    m.value, n, r, theta, float(mean[rounds[r], j]),
                    _standard_error(samples), survivor_fraction(m, r, theta),
                )

        for r in range(1, self.run_config.r_max + 1):
            exits = (remaining[:, rounds[r]] - remaining[:, rounds[r + 1]]).mean() / n
            limit = survivor_fraction(m, r) - survivor_fraction(m, r + 1)
            self.exit_rounds.add_row(m.value, n, r, float(exits), limit)

        self._add_ranks(results)
        self._add_welfare(results, limit_curve)

    def _add_ranks(self, results: TrialResults) -> None:
        job = results.job
        m, n = job.mechanism, job.n
        matrix = distribution_from_results(results, self.run_config.s_max)

        for position in sorted({matrix.positions[0], matrix.positions[-1]}):
            theta = position / n
            limit = q_vector(m, theta, matrix.width)
            row = matrix.row(position)
            overflow = float(matrix.overflow[matrix.positions.index(position)])
            for s in range(1, matrix.width + 1):
                self.ranks.add_row(
                    m.value, n, position, theta, s, float(row[s - 1]), float(limit[s - 1]), overflow
                )

        try:
            report = order_bias_report(matrix, self.rule)
        except DegenerateRule as e:
            self.logger.warning(f"No order bias for {m.value} n={n}: {e}")
            self.bias.add_row(m.value, n, self.rule.label, *([None] * 7))
            return
        try:
            limit = order_bias_limit(m, self.rule)
        except NoLimitRule:
            limit = None
        low, high = report.interval if report.interval else (None, None)
        if report.disagreement:
            self.logger.warning(
                f"{m.value} n={n}: order bias forms differ "
                f"({report.max_form:.4f} vs {report.extreme_form:.4f})"
            )
        self.bias.add_row(
            m.value, n, self.rule.label, report.max_form, report.extreme_form,
            report.std_error, low, high, report.disagreement, limit,
        )

    def _add_welfare(self, results: TrialResults, limit_curve: Optional[WelfareCurve]) -> None:
        m, n = results.job.mechanism, results.job.n
        empirical = empirical_welfare_curve(results)
        for j, theta in enumerate(self.grid):
            self.welfare.add_row(
                m.value, n, self.rule.label, theta, empirical.values[j],
                limit_curve.values[j] if limit_curve else None,
                limit_curve.tail_mass[j] if limit_curve else None,
            )

    def add_trace(self, mechanism: Mechanism, n: int) -> None:
        """Per-round bid counts of trial 0 next to their limits."""
        rng = RngSpec(master_seed=self.run_config.seed, trial_index=0)
        _, trace = run_with_trace(mechanism, n, rng, self.grid)
        cells = {(c.round, c.rank, c.theta_index): c for c in trace.rank_counts}

        for r in self.run_config.rounds:
            for s in self.run_config.ranks:
                for j, theta in enumerate(self.grid):
                    cell = cells.get((r, s, j))
                    bids, failed, won = (
                        (cell.bids, cell.unsuccessful, cell.successful) if cell else (0, 0, 0)
                    )
                    limit = group_limits(mechanism, theta, r, s)
                    self.trace.add_row(
                        mechanism.value, n, r, s, theta,
                        bids / n, failed / n, won / n,
                        limit.bids, limit.unsuccessful, limit.successful,
                    )


def execute(run_config: RunConfig) -> List[ResultTable]:
    runner = TrialRunner(run_config.threads)
    report = SimulationReport(run_config)

    stage = 0
    for n in run_config.n:
        resource_guard.require_workload(n, run_config.trials, run_config.allow_large)
        for mechanism in run_config.mechanisms:
            stage += 1
            with StageLogger(logger, f"{mechanism.value} n={n} x {run_config.trials}", stage,
                             work=n * run_config.trials):
                results = runner.run(make_job(run_config, mechanism, n), run_config.trials)
                report.add_results(results)
                report.add_trace(mechanism, n)
            status(f"  ✅ {mechanism.label} n={n}: {run_config.trials} trials")
    return report.tables()


def build_parser():
    parser = make_parser(
        prog="allocsim simulate",
        description="Run seeded trials and set them beside the limiting quantities",
        epilog="""
Examples:
  # Naive Boston survivors at n = 10000
  python -m src.cli simulate --mech nb --n 10000 --trials 100 --seed 7

  # Fraction of Adaptive Boston agents unmatched after four rounds
  python -m src.cli simulate --mech ab --n 10000 --trials 100 --rounds 1-4

  # All mechanisms, Borda welfare and bias, extreme positions only, 4 workers
  python -m src.cli simulate --n 1000,5000 --rule borda --positions extremes --threads 4

  # A single Serial Dictatorship run with one agent
  python -m src.cli simulate --mech sd --n 1 --trials 1
        """
    )

    parser.add_argument("--mech", type=mechanism_list, help="Mechanisms (default all)")
    parser.add_argument("--n", type=int_list, help="Numbers of agents (default 1000)")
    parser.add_argument("--trials", type=int, help="Trials per mechanism and n (default 100)")
    parser.add_argument("--theta", type=theta_list, help="theta grid (default 0:1:0.05)")
    parser.add_argument("--rounds", type=int_list, help="Rounds reported (default 1-4)")
    parser.add_argument("--ranks", type=int_list, help="Ranks in the bid trace (default 1-4)")
    parser.add_argument(
        "--rule",
        type=str,
        help="Scoring rule: k1, k3, borda, ... (default k1)"
    )
    parser.add_argument(
        "--positions",
        choices=["all", "extremes"],
        help="Positions kept for rank matrices (default all)"
    )
    add_simulation_arguments(parser)
    return parser


def make_config(args) -> RunConfig:
    return build_run_config(
        "simulate",
        args,
        mechanisms=args.mech,
        n=args.n,
        trials=args.trials,
        theta_grid=args.theta,
        rounds=args.rounds,
        ranks=args.ranks,
        rule=args.rule,
        positions=args.positions,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Simulate the requested mechanisms and sizes."""
    status("\nallocsim simulate")
    return run_command(build_parser(), argv, make_config, execute)


if __name__ == "__main__":
    sys.exit(main())
