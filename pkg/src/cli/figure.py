#!/usr/bin/env python3
"""CLI entry point for figure data (series only, no plotting)."""
import sys
from pathlib import Path
from typing import List, Optional, Sequence

# Add src to path if running as script
if __name__ == "__main__":
    src_path = Path(__file__).parent.parent.parent
    sys.path.insert(0, str(src_path))

from src.cli.common import (
    build_run_config,
    int_list,
    make_parser,
    mechanism_list,
    run_command,
    status,
    theta_list,
)
from src.limits.naive import naive_limits
from src.limits.rank_limits import (
    ab_individual_limits,
    order_bias_limit,
    q_vector,
    welfare_limit_kapproval,
)
from src.models.mechanism import Mechanism
from src.models.result_table import ResultTable
from src.models.run_config import RunConfig
from src.models.scoring_rule import ScoringRule
from src.utils.config import config
from src.utils.logger import StageLogger, setup_logger

logger = setup_logger("FigureCommand")

# Defaults when the corresponding flag is not given
FIGURE_K = list(range(1, 11))
FIGURE_RANKS = list(range(1, 7))
LAST_AGENT_RANKS = 20


def _grid(run_config: RunConfig) -> List[float]:
    return run_config.theta_grid or config.default_theta_grid()


def figure1(run_config: RunConfig) -> ResultTable:
    """z_r(theta) against theta, one series per round."""
    rounds = run_config.rounds
    table = ResultTable(name="figure1", columns=["theta"] + [f"r{r}" for r in rounds])
    for theta in _grid(run_config):
        state = naive_limits(theta, max(rounds))
        table.add_row(theta, *(state.z_at(r) for r in rounds))
    return table


def _q_series(name: str, mechanism: Mechanism, run_config: RunConfig) -> ResultTable:
    ranks = run_config.ranks
    table = ResultTable(name=name, columns=["theta"] + [f"s{s}" for s in ranks])
    for theta in _grid(run_config):
        q = q_vector(mechanism, theta, max(ranks))
        table.add_row(theta, *(float(q[s - 1]) for s in ranks))
    return table


def figure2(run_config: RunConfig) -> ResultTable:
    """Naive Boston: probability of exiting at round s (= obtaining rank s) against theta."""
    return _q_series("figure2", Mechanism.NB, run_config)


def figure3(run_config: RunConfig) -> ResultTable:
    """Adaptive Boston q_s(theta) against theta."""
    return _q_series("figure3", Mechanism.AB, run_config)


def figure4(run_config: RunConfig) -> ResultTable:
    """
    Last agent under Adaptive Boston, round 2: rank bid for (u_2s) and rank
    obtained (u_2s (1 - g_2)), both given presence at round 2, plus the
    unconditional probabilities.
    """
    table = ResultTable(
        name="figure4",
        columns=["s", "bid", "success", "bid_probability", "success_probability"],
    )
    for s in range(1, run_config.s_max + 1):
        limits = ab_individual_limits(1.0, 2, s)
        table.add_row(
            s,
            limits.bid / limits.present,
            limits.matched / limits.present,
            limits.bid,
            limits.matched,
        )
    return table


def figure5(run_config: RunConfig) -> ResultTable:
    """Limiting k-approval welfare against k."""
    mechanisms = run_config.mechanisms
    table = ResultTable(name="figure5", columns=["k"] + [m.value for m in mechanisms])
    for k in run_config.k:
        table.add_row(k, *(welfare_limit_kapproval(m, k) for m in mechanisms))
    return table


def figure6(run_config: RunConfig) -> ResultTable:
    """Limiting k-approval order bias against k."""
    mechanisms = run_config.mechanisms
    table = ResultTable(name="figure6", columns=["k"] + [m.value for m in mechanisms])
    for k in run_config.k:
        rule = ScoringRule.k_approval(k)
        table.add_row(k, *(order_bias_limit(m, rule) for m in mechanisms))
    return table


FIGURES = {1: figure1, 2: figure2, 3: figure3, 4: figure4, 5: figure5, 6: figure6}


def execute(run_config: RunConfig) -> List[ResultTable]:
    with StageLogger(logger, f"figure {run_config.figure}", run_config.figure):
        return [FIGURES[run_config.figure](run_config)]


def build_parser():
    parser = make_parser(
        prog="allocsim figure",
        description="Write the data series behind each figure as CSV or JSON",
        epilog="""
Examples:
  # Naive Boston survivors z_r(theta) for rounds 1-4
  python -m src.cli figure --figure 1

  # Adaptive Boston q_s(theta) for s = 1..8 on a fine grid
  python -m src.cli figure --figure 3 --ranks 1-8 --theta 0:1:0.01

  # Last agent, round 2 bids and successes up to rank 30
  python -m src.cli figure --figure 4 --s-max 30

  # Welfare and bias against k = 1..10
  python -m src.cli figure --figure 5
  python -m src.cli figure --figure 6 --output figure6.json --format json
        """
    )

    parser.add_argument(
        "--figure",
        type=int,
        choices=sorted(FIGURES),
        help="1: NB survivors, 2: NB exit round, 3: AB q_s, "
             "4: AB last agent round 2, 5: welfare vs k, 6: bias vs k"
    )

    parser.add_argument(
        "--theta",
        type=theta_list,
        help="theta grid for figures 1-3 (default 0:1:0.05)"
    )

    parser.add_argument(
        "--rounds",
        type=int_list,
        help="Series for figure 1 (default 1-4)"
    )

    parser.add_argument(
        "--ranks",
        type=int_list,
        help="Series for figures 2-3 (default 1-6)"
    )

    parser.add_argument(
        "--k",
        type=int_list,
        help="k values for figures 5-6 (default 1-10)"
    )

    parser.add_argument(
        "--mech",
        type=mechanism_list,
        help="Mechanisms for figures 5-6 (default all)"
    )

    return parser


def make_config(args) -> RunConfig:
    return build_run_config(
        "figure",
        args,
        defaults=dict(
            ranks=FIGURE_RANKS,
            k=FIGURE_K,
            s_max=LAST_AGENT_RANKS if args.figure == 4 else None,
        ),
        figure=args.figure,
        theta_grid=args.theta,
        rounds=args.rounds,
        ranks=args.ranks,
        k=args.k,
        mechanisms=args.mech,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Write the data of one figure."""
    status("\nallocsim figure")
    return run_command(build_parser(), argv, make_config, execute)


if __name__ == "__main__":
    sys.exit(main())
