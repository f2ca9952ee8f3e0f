"""Run log for CLI invocations.

Keeps a persistent JSONL record of every command run, with the full run
configuration, each output file written (and a digest of its payload) and
the final status. Result files themselves carry no timestamps, so anything
time-dependent lives here.
"""
import hashlib
import json
import threading
from contextlib import contextmanager
from dataclasses import dataclass, asdict, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

from src.utils.logger import setup_logger


@dataclass
class OutputEntry:
    """One file produced by a run."""
    path: str
    table: str
    rows: int
    payload_sha256: str


@dataclass
class RunSummary:
    """Summary of a CLI run."""
    run_id: str
    subcommand: str
    start_time: str
    end_time: Optional[str] = None
    outputs: List[str] = field(default_factory=list)
    total_duration_ms: int = 0
    config: Dict[str, Any] = field(default_factory=dict)
    final_status: str = "running"  # running, completed, failed


def payload_digest(payload: str) -> str:
    """sha256 of a rendered payload; equal digests mean byte-identical output."""
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class RunLog:
    """
    Thread-safe run logger writing one JSONL file per run.

    Usage:
        run_log = RunLog()
        with run_log.run_context("simulate", run_config.model_dump(mode="json")):
            ...
            run_log.log_output(OutputEntry(...))
    """

    def __init__(self, log_dir: Optional[Path] = None):
        self.logger = setup_logger("RunLog")
        if log_dir is None:
            from src.utils.config import config
            log_dir = config.run_logs_dir
        self.log_dir = log_dir

        self._current_log_path: Optional[Path] = None
        self._current_summary: Optional[RunSummary] = None
        self._started: Optional[datetime] = None
        self._lock = threading.Lock()

    def start_run(self, subcommand: str, run_config: Optional[Dict[str, Any]] = None) -> Path:
        """Open a new log file and write the run_start entry."""
        with self._lock:
            self.log_dir.mkdir(parents=True, exist_ok=True)
            self._started = datetime.now(timezone.utc)
            run_id = f"{subcommand}_{self._started.strftime('%Y%m%d_%H%M%S_%f')}"
            self._current_log_path = self.log_dir / f"{run_id}.jsonl"

            self._current_summary = RunSummary(
                run_id=run_id,
                subcommand=subcommand,
                start_time=self._started.isoformat(),
                config=run_config or {},
            )

            self._write_line({
                "type": "run_start",
                "run_id": run_id,
                "subcommand": subcommand,
                "start_time": self._started.isoformat(),
                "config": run_config or {},
            })
            self.logger.debug(f"Started run log: {self._current_log_path}")
            return self._current_log_path

    def log_output(self, entry: OutputEntry) -> None:
        """Record one output file."""
        with self._lock:
            if not self._current_log_path:
                self.logger.warning("No active run - call start_run first")
                return
            if self._current_summary:
                self._current_summary.outputs.append(entry.path)
            self._write_line({"type": "output", **asdict(entry)})

    def end_run(self, success: bool, error: Optional[str] = None) -> Optional[RunSummary]:
        """Write the run_end entry and reset state."""
        with self._lock:
            if not self._current_log_path or not self._current_summary:
                self.logger.warning("No active run to end")
                return None

            end_time = datetime.now(timezone.utc)
            summary = self._current_summary
            summary.end_time = end_time.isoformat()
            summary.total_duration_ms = int((end_time - self._started).total_seconds() * 1000)
            summary.final_status = "completed" if success else "failed"

            self._write_line({"type": "run_end", **asdict(summary), "error": error})
            self.logger.info(
                f"Run {summary.final_status}: {summary.subcommand} "
                f"({len(summary.outputs)} outputs, {summary.total_duration_ms} ms)"
            )

            self._current_log_path = None
            self._current_summary = None
            return summary

    def _write_line(self, data: Dict[str, Any]) -> None:
        if not self._current_log_path:
            return
        try:
            with open(self._current_log_path, "a") as f:
                f.write(json.dumps(data, default=str) + "\n")
        except OSError as e:
            self.logger.error(f"Failed to write run log: {e}")

    @staticmethod
    def load_log(log_path: Path) -> List[Dict[str, Any]]:
        """Parse a run log file."""
        entries = []
        with open(log_path) as f:
            for line in f:
                line = line.strip()
                if line:
                    entries.append(json.loads(line))
        return entries

    @contextmanager
    def run_context(self, subcommand: str, run_config: Optional[Dict[str, Any]] = None):
        """
        Context manager around one CLI run.

        Usage:
            with run_log.run_context("limits", cfg) as log_path:
                ...
        """
        log_path = self.start_run(subcommand, run_config)
        success = True
        error = None
        try:
            yield log_path
        except Exception as e:
            success = False
            error = str(e)
            raise
        finally:
            self.end_run(success=success, error=error)
