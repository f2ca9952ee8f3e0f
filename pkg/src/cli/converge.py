#!/usr/bin/env python3
"""CLI entry point for error-versus-n tables."""
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

# Add src to path if running as script
if __name__ == "__main__":
    src_path = Path(__file__).parent.parent.parent
    sys.path.insert(0, str(src_path))

import numpy as np

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
from src.limits.rank_limits import q_vector, survivor_fraction
from src.mechanisms.trial_runner import TrialJob, TrialResults, TrialRunner
from src.models.mechanism import Mechanism
from src.models.result_table import ResultTable
from src.models.run_config import RunConfig
from src.utils.config import config
from src.utils.logger import StageLogger, setup_logger
from src.utils.resource_guard import resource_guard
from src.welfare.welfare import welfare_limit_curve

logger = setup_logger("ConvergeCommand")

STATISTICS = ("survivors", "welfare", "last_agent")

# (round or None, aggregate error, per-trial errors or None)
ErrorRow = Tuple[Optional[int], float, Optional[np.ndarray]]


def _grid(run_config: RunConfig) -> List[float]:
    return run_config.theta_grid or config.default_theta_grid()


def survivor_errors(results: TrialResults, rounds: Sequence[int]) -> List[ErrorRow]:
    """sup over theta of |N_n(r, theta)/n - z_r or y_r|, for the mean and for each trial."""
    job = results.job
    rows = []
    mean = results.mean_survivor_fraction()
    for i, r in enumerate(job.rounds):
        if r not in rounds:
            continue
        limit = np.array([survivor_fraction(job.mechanism, r, t) for t in job.theta_grid])
        per_trial = np.abs(results.survivors[:, i, :] / job.n - limit).max(axis=1)
        rows.append((r, float(np.abs(mean[i] - limit).max()), per_trial))
    return rows


def welfare_errors(results: TrialResults, limit: np.ndarray) -> List[ErrorRow]:
    """sup over theta of |W_n(theta)/n - W(theta)|."""
    per_trial = np.abs(results.welfare / results.job.n - limit).max(axis=1)
    return [(None, float(np.abs(results.mean_welfare() - limit).max()), per_trial)]


def last_agent_errors(results: TrialResults, s_max: int) -> List[ErrorRow]:
    """max over s of |P(last agent gets rank s) - q_s(1)|; aggregate only."""
    job = results.job
    matrix = distribution_from_results(results, s_max)
    limit = q_vector(job.mechanism, 1.0, matrix.width)
    return [(None, float(np.abs(matrix.row(job.n) - limit).max()), None)]


def _non_increasing(values: List[float]) -> bool:
    return all(b <= a for a, b in zip(values, values[1:]))


def execute(run_config: RunConfig) -> List[ResultTable]:
    statistic = run_config.statistic
    rule = run_config.scoring_rule
    grid = _grid(run_config)
    sizes = sorted(run_config.n)
    runner = TrialRunner(run_config.threads)

    errors = ResultTable(name="converge", columns=[
        "mechanism", "statistic", "rule", "r", "n", "trials",
        "error", "median_trial_error", "mean_trial_error",
    ])
    decay = ResultTable(name="converge_decay", columns=[
        "mechanism", "statistic", "r", "sizes", "error_non_increasing", "median_non_increasing",
    ])

    for n in sizes:
        resource_guard.require_workload(n, run_config.trials, run_config.allow_large)

    stage = 0
    for mechanism in run_config.mechanisms:
        limit_curve = None
        if statistic == "welfare":
            limit_curve = np.asarray(
                welfare_limit_curve(mechanism, rule, grid, run_config.s_max).values
            )
        # r -> [(aggregate, median)] in order of n
        history: Dict[Optional[int], List[Tuple[float, Optional[float]]]] = {}

        for n in sizes:
            stage += 1
            job = TrialJob(
                mechanism=mechanism,
                n=n,
                master_seed=run_config.seed,
                positions=[n],
                rounds=tuple(run_config.rounds),
                theta_grid=tuple(grid),
                rule=rule if statistic == "welfare" else None,
            )
            with StageLogger(logger, f"{mechanism.value} {statistic} n={n}", stage,
                             work=n * run_config.trials):
                results = runner.run(job, run_config.trials)

            if statistic == "survivors":
                rows = survivor_errors(results, run_config.rounds)
            elif statistic == "welfare":
                rows = welfare_errors(results, limit_curve)
            else:
                rows = last_agent_errors(results, run_config.s_max)

            for r, error, per_trial in rows:
                median = float(np.median(per_trial)) if per_trial is not None else None
                mean = float(per_trial.mean()) if per_trial is not None else None
                errors.add_row(
                    mechanism.value, statistic, rule.label if statistic == "welfare" else None,
                    r, n, results.trials, error, median, mean,
                )
                history.setdefault(r, []).append((error, median))
            status(f"  ✅ {mechanism.label} n={n}")

        for r, entries in history.items():
            medians = [median for _, median in entries]
            decay.add_row(
                mechanism.value, statistic, r, ";".join(str(n) for n in sizes),
                _non_increasing([error for error, _ in entries]),
                _non_increasing(medians) if None not in medians else None,
            )

    return [errors, decay]


def build_parser():
    parser = make_parser(
        prog="allocsim converge",
        description="Measure how fast simulated statistics approach their limits",
        epilog="""
Examples:
  # Naive Boston round-2 survivors, 50 trials per size
  python -m src.cli converge --mech nb --statistic survivors --rounds 2 \\
      --n 100,1000,10000 --trials 50

  # Serial Dictatorship Borda welfare
  python -m src.cli converge --mech sd --statistic welfare --rule borda --n 100,1000,10000

  # Last agent's rank distribution under Adaptive Boston
  python -m src.cli converge --mech ab --statistic last_agent --n 1000,10000 --s-max 10
        """
    )

    parser.add_argument("--mech", type=mechanism_list, help="Mechanisms (default all)")
    parser.add_argument("--n", type=int_list, help="Sizes to compare (default 100,1000)")
    parser.add_argument("--trials", type=int, help="Trials per size (default 100)")
    parser.add_argument(
        "--statistic",
        choices=STATISTICS,
        help="survivors: N_n(r,theta)/n; welfare: W_n(theta)/n; "
             "last_agent: rank distribution of position n (default survivors)"
    )
    parser.add_argument("--theta", type=theta_list, help="theta grid (default 0:1:0.05)")
    parser.add_argument("--rounds", type=int_list, help="Rounds for survivors (default 1-4)")
    parser.add_argument("--rule", type=str, help="Scoring rule for welfare (default k1)")
    add_simulation_arguments(parser)
    return parser


def make_config(args) -> RunConfig:
    return build_run_config(
        "converge",
        args,
        defaults=dict(n=[100, 1000]),
        mechanisms=args.mech,
        n=args.n,
        trials=args.trials,
        statistic=args.statistic,
        theta_grid=args.theta,
        rounds=args.rounds,
        rule=args.rule,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Write error-versus-n tables for one statistic."""
    status("\nallocsim converge")
    return run_command(build_parser(), argv, make_config, execute)


if __name__ == "__main__":
    sys.exit(main())
