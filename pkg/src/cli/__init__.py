"""CLI component - limits, figure, simulate and converge subcommands."""
