"""allocsim command line: python -m src.cli <subcommand> [options]."""
import sys
from pathlib import Path
from typing import List, Optional, Sequence

# Add src to path if running as script
if __name__ == "__main__" and __package__ in (None, ""):
    src_path = Path(__file__).parent.parent.parent
    sys.path.insert(0, str(src_path))

from src import __version__
from src.cli import converge, figure, limits, simulate
from src.cli.common import EXIT_OK, EXIT_USAGE, status
from src.utils.config import config

COMMANDS = {
    "limits": (limits.main, "Tables of limiting quantities"),
    "figure": (figure.main, "Data series behind each figure"),
    "simulate": (simulate.main, "Seeded trials beside their limits"),
    "converge": (converge.main, "Error against n for one statistic"),
}


def _usage() -> None:
    status(f"allocsim {__version__}")
    status("\nUsage: python -m src.cli <subcommand> [options]\n")
    status("Subcommands:")
    for name, (_, summary) in COMMANDS.items():
        status(f"  {name:<10} {summary}")
    status(f"  {'config':<10} Show the active configuration")
    status("\nRun 'python -m src.cli <subcommand> --help' for options.")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args: List[str] = list(sys.argv[1:] if argv is None else argv)
    if not args or args[0] in ("-h", "--help"):
        _usage()
        return EXIT_OK if args else EXIT_USAGE
    if args[0] == "--version":
        print(__version__)
        return EXIT_OK
    if args[0] == "config":
        config.print_status()
        return EXIT_OK

    command = COMMANDS.get(args[0])
    if command is None:
        status(f"❌ Unknown subcommand: {args[0]}")
        _usage()
        return EXIT_USAGE
    return command[0](args[1:])


if __name__ == "__main__":
    sys.exit(main())
