"""Shared plumbing for the allocsim subcommands.

Each subcommand module supplies an argparse parser, a function turning the
parsed arguments into a RunConfig, and an `execute(run_config)` returning
the result tables. `run_command` does the rest: validation, the run log,
writing files and mapping failures to exit codes.
"""
import argparse
import secrets
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import yaml
from pydantic import ValidationError

from src.models.mechanism import Mechanism
from src.models.result_table import ResultTable
from src.models.run_config import RunConfig
from src.utils.config import config
from src.utils.errors import AllocSimError, ConfigError
from src.utils.logger import setup_logger
from src.utils.run_log import OutputEntry, RunLog, payload_digest

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RUNTIME = 3

STDOUT = "-"

logger = setup_logger("CLI")


def status(message: str) -> None:
    """Human-facing progress line; stdout is reserved for `--output -`."""
    print(message, file=sys.stderr)


# =========================================================================
# ARGUMENT TYPES
# =========================================================================

def int_list(text: str) -> List[int]:
    """'1,2,3' or '1-10' (inclusive) or a mix such as '1-3,10'."""
    values: List[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if "-" in part[1:]:
                low, high = part.split("-", 1)
                values.extend(range(int(low), int(high) + 1))
            elif part:
                values.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers like '1,2,3' or '1-10', got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def theta_list(text: str) -> List[float]:
    """'0.25,0.5,1' or a range 'start:stop:step' (stop included)."""
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            count = int(round((stop - start) / step))
            return [round(start + i * step, 12) for i in range(count + 1)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected values like '0.25,0.5,1' or '0:1:0.05', got {text!r}"
        )


def seed_value(text: str) -> int:
    """An integer in [0, 2^64), or 'random' for a fresh seed."""
    if text == "random":
        return secrets.randbits(63)
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer or 'random', got {text!r}")
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must lie in [0, 2^64), got {value}")
    return value


def mechanism_list(text: str) -> List[Mechanism]:
    """'all' or a comma list of sd, nb, ab."""
    if text.strip().lower() == "all":
        return list(Mechanism)
    try:
        return [Mechanism(part.strip().lower()) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"mechanisms are sd, nb, ab or 'all', got {text!r}")


# =========================================================================
# PARSER AND CONFIG
# =========================================================================

def make_parser(prog: str, description: str, epilog: str) -> argparse.ArgumentParser:
    """Parser with the options every subcommand shares."""
    parser = argparse.ArgumentParser(
        prog=prog,
        description=description,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=epilog,
    )

    parser.add_argument(
        "--config",
        type=Path,
        help="YAML run config; command-line flags override its values"
    )

    parser.add_argument(
        "--output",
        type=str,
        help="Output file or directory ('-' for stdout; default artifacts/outputs/<subcommand>)"
    )

    parser.add_argument(
        "--format",
        choices=["csv", "json"],
        default=None,
        help="Output format (default csv)"
    )

    parser.add_argument(
        "--s-max",
        type=int,
        help=f"Rank truncation for limits (default {config.s_max})"
    )

    parser.add_argument(
        "--r-max",
        type=int,
        help=f"Deepest round reported (default {config.r_max})"
    )

    return parser


def add_simulation_arguments(parser: argparse.ArgumentParser) -> None:
    """Options for subcommands that run trials."""
    parser.add_argument(
        "--seed",
        type=seed_value,
        help=f"Master seed, or 'random' (default {config.default_seed})"
    )

    parser.add_argument(
        "--threads",
        type=int,
        help="Worker processes (default: ALLOCSIM_THREADS or 1)"
    )

    parser.add_argument(
        "--allow-large",
        action="store_true",
        help="Run even when n * trials exceeds the workload cap"
    )


def build_run_config(subcommand: str, args: argparse.Namespace,
                     defaults: Optional[Dict[str, Any]] = None, **fields: Any) -> RunConfig:
    """
    RunConfig from parsed arguments. Flags win over the YAML file, which
    wins over the subcommand's `defaults`, which win over RunConfig's own.
    """
    shared = dict(
        output=args.output,
        format=args.format,
        s_max=args.s_max,
        r_max=args.r_max,
        seed=getattr(args, "seed", None),
        threads=getattr(args, "threads", None),
        allow_large=getattr(args, "allow_large", False) or None,
    )
    for key, value in shared.items():
        if fields.get(key) is None:
            fields[key] = value
    try:
        if args.config is not None:
            if not args.config.exists():
                raise ConfigError(f"config file not found: {args.config}")
            return RunConfig.from_yaml(args.config, defaults, subcommand=subcommand, **fields)
        merged = {k: v for k, v in (defaults or {}).items() if v is not None}
        merged.update({k: v for k, v in fields.items() if v is not None})
        return RunConfig(subcommand=subcommand, **merged)
    except ValidationError as e:
        raise ConfigError(str(e)) from e
    except yaml.YAMLError as e:
        raise ConfigError(f"{args.config}: {e}") from e


# =========================================================================
# OUTPUT
# =========================================================================

def output_paths(run_config: RunConfig, tables: Sequence[ResultTable]) -> List[Optional[Path]]:
    """Destination of each table; None means stdout."""
    if run_config.output is not None and str(run_config.output) == STDOUT:
        return [None] * len(tables)
    suffix = f".{run_config.format}"
    target = run_config.output
    if target is not None and target.suffix == suffix:
        if len(tables) == 1:
            return [target]
        return [target.parent / f"{target.stem}_{table.name}{suffix}" for table in tables]
    directory = target if target is not None else config.outputs_dir / run_config.subcommand
    return [directory / f"{table.name}{suffix}" for table in tables]


def write_tables(run_config: RunConfig, tables: Sequence[ResultTable], run_log: RunLog) -> List[str]:
    """Stamp provenance on every table, write it, and record it in the run log."""
    written = []
    provenance = run_config.provenance()
    for table, path in zip(tables, output_paths(run_config, tables)):
        table.provenance = provenance
        if path is None:
            sys.stdout.write(table.render(run_config.format))
            destination = STDOUT
        else:
            table.save(path, run_config.format)
            destination = str(path)
        run_log.log_output(OutputEntry(
            path=destination,
            table=table.name,
            rows=len(table.rows),
            payload_sha256=payload_digest(table.payload()),
        ))
        written.append(destination)
    return written


# =========================================================================
# RUNNER
# =========================================================================

def run_command(
    parser: argparse.ArgumentParser,
    argv: Optional[Sequence[str]],
    make_config: Callable[[argparse.Namespace], RunConfig],
    execute: Callable[[RunConfig], List[ResultTable]],
) -> int:
    """
    Parse, validate, execute and write. Returns the process exit code:
    0 success, 2 usage or configuration error, 3 runtime failure.
    """
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        run_config = make_config(args)
    except ConfigError as e:
        status(f"❌ Invalid configuration: {e}")
        return EXIT_USAGE

    run_log = RunLog()
    try:
        with run_log.run_context(run_config.subcommand, run_config.model_dump(mode="json")):
            tables = execute(run_config)
            written = write_tables(run_config, tables, run_log)
    except ConfigError as e:
        status(f"❌ Invalid configuration: {e}")
        return EXIT_USAGE
    except (AllocSimError, OSError) as e:
        status(f"❌ {run_config.subcommand} failed: {e}")
        return EXIT_RUNTIME

    status("\n" + "═" * 60)
    status(f"✅ {run_config.subcommand}: {len(written)} table(s)")
    for table, destination in zip(tables, written):
        status(f"  • {table.name:<24} {len(table.rows):>6} rows  → {destination}")
    status("═" * 60)
    return EXIT_OK
