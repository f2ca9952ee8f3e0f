#!/usr/bin/env python3
"""CLI entry point for the limiting-quantity tables."""
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
from src.limits.adaptive import adaptive_limits
from src.limits.naive import naive_limits
from src.limits.rank_limits import order_bias_limit, welfare_limit_kapproval
from src.limits.urn import u_table
from src.models.result_table import ResultTable
from src.models.run_config import RunConfig
from src.models.scoring_rule import ScoringRule
from src.utils.logger import StageLogger, setup_logger

logger = setup_logger("LimitsCommand")

# theta values of the published early-round tables
TABLE_THETAS = [0.25, 0.5, 1.0]


def _thetas(run_config: RunConfig) -> List[float]:
    return run_config.theta_grid or TABLE_THETAS


def table1(run_config: RunConfig) -> List[ResultTable]:
    """omega_r, z_r, z'_r, f_r for Naive Boston."""
    table = ResultTable(name="table1", columns=["theta", "r", "omega", "z", "z_prime", "f"])
    depth = max(run_config.rounds)
    for theta in _thetas(run_config):
        state = naive_limits(theta, depth)
        for r in run_config.rounds:
            table.add_row(
                theta, r, float(state.omega[r - 1]),
                state.z_at(r), state.z_prime_at(r), state.f_at(r),
            )
    return [table]


def table2(run_config: RunConfig) -> List[ResultTable]:
    """y_r, y'_r, g_r for Adaptive Boston, plus the u_rs rows and their tails."""
    table = ResultTable(name="table2", columns=["theta", "r", "y", "y_prime", "g"])
    depth = max(run_config.rounds)
    for theta in _thetas(run_config):
        state = adaptive_limits(theta, depth)
        for r in run_config.rounds:
            table.add_row(theta, r, state.y_at(r), state.y_prime_at(r), state.g_at(r))

    u = u_table(run_config.s_max)
    cells = ResultTable(name="table2_u", columns=["r", "s", "u"])
    rows = ResultTable(name="table2_u_rows", columns=["r", "s_max", "row_sum", "tail_mass"])
    for r in run_config.rounds:
        for s in range(r, run_config.s_max + 1):
            cells.add_row(r, s, u.u(r, s))
        rows.add_row(r, run_config.s_max, u.row_sum(r), u.tail_mass(r))
    return [table, cells, rows]


def table3(run_config: RunConfig) -> List[ResultTable]:
    """Limiting k-approval welfare W(1)/n."""
    mechanisms = run_config.mechanisms
    table = ResultTable(name="table3", columns=["k"] + [m.value for m in mechanisms])
    for k in run_config.k:
        table.add_row(k, *(welfare_limit_kapproval(m, k) for m in mechanisms))
    return [table]


def table4(run_config: RunConfig) -> List[ResultTable]:
    """Limiting order bias for k-approval, with Borda as a last row."""
    mechanisms = run_config.mechanisms
    table = ResultTable(name="table4", columns=["rule", "k"] + [m.value for m in mechanisms])
    for k in run_config.k:
        rule = ScoringRule.k_approval(k)
        table.add_row(rule.label, k, *(order_bias_limit(m, rule) for m in mechanisms))
    borda = ScoringRule.borda()
    table.add_row(borda.label, None, *(order_bias_limit(m, borda) for m in mechanisms))
    return [table]


TABLES = {1: table1, 2: table2, 3: table3, 4: table4}


def execute(run_config: RunConfig) -> List[ResultTable]:
    with StageLogger(logger, f"table {run_config.table}", run_config.table):
        return TABLES[run_config.table](run_config)


def build_parser():
    parser = make_parser(
        prog="allocsim limits",
        description="Tabulate limiting quantities as the number of agents grows",
        epilog="""
Examples:
  # Naive Boston survival quantities at the default theta values
  python -m src.cli limits --table 1

  # z_r(0) for the first six rounds
  python -m src.cli limits --table 1 --theta 0 --rounds 1-6

  # Adaptive Boston quantities and the u-table up to rank 50
  python -m src.cli limits --table 2 --s-max 50

  # k-approval welfare limits as JSON on stdout
  python -m src.cli limits --table 3 --k 1-3 --format json --output -

  # Order bias limits for Naive and Adaptive Boston only
  python -m src.cli limits --table 4 --k 1 --mech nb,ab
        """
    )

    parser.add_argument(
        "--table",
        type=int,
        choices=sorted(TABLES),
        help="1: Naive Boston z/f, 2: Adaptive Boston y/g and u-table, "
             "3: k-approval welfare, 4: order bias"
    )

    parser.add_argument(
        "--theta",
        type=theta_list,
        help="theta values for tables 1-2 (default 0.25,0.5,1)"
    )

    parser.add_argument(
        "--rounds",
        type=int_list,
        help="Rounds for tables 1-2 (default 1-4)"
    )

    parser.add_argument(
        "--k",
        type=int_list,
        help="k values for tables 3-4 (default 1-3)"
    )

    parser.add_argument(
        "--mech",
        type=mechanism_list,
        help="Mechanisms for tables 3-4 (default all)"
    )

    return parser


def make_config(args) -> RunConfig:
    return build_run_config(
        "limits",
        args,
        table=args.table,
        theta_grid=args.theta,
        rounds=args.rounds,
        k=args.k,
        mechanisms=args.mech,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Write one of the limiting-quantity tables."""
    status("\nallocsim limits")
    return run_command(build_parser(), argv, make_config, execute)


if __name__ == "__main__":
    sys.exit(main())
