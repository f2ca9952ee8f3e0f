"""Logging for allocsim: colored console lines or JSON lines, always on stderr."""
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, Optional

NAMESPACE = "allocsim"

# LogRecord attributes that are not user context
_RECORD_FIELDS = set(logging.makeLogRecord({}).__dict__) | {"message", "asctime"}


class ColoredFormatter(logging.Formatter):
    """Level names colored for a terminal."""

    COLORS = {
        'DEBUG': '\033[36m',
        'INFO': '\033[32m',
        'WARNING': '\033[33m',
        'ERROR': '\033[31m',
        'CRITICAL': '\033[35m',
    }
    RESET = '\033[0m'

    def format(self, record):
        color = self.COLORS.get(record.levelname, self.RESET)
        record = logging.makeLogRecord(record.__dict__)
        record.levelname = f"{color}{record.levelname}{self.RESET}"
        return super().format(record)


class JsonLineFormatter(logging.Formatter):
    """
    One JSON object per record.

    Anything passed through `extra=` (stage, mechanism, n, trials, seconds)
    lands as a top-level key, so a run can be filtered with jq.
    """

    def format(self, record: logging.LogRecord) -> str:
        entry: Dict[str, Any] = {
            "time": self.formatTime(record, "%Y-%m-%dT%H:%M:%S"),
            "logger": record.name,
            "level": record.levelname,
            "message": record.getMessage(),
        }
        for key, value in record.__dict__.items():
            if key not in _RECORD_FIELDS and not key.startswith("_"):
                entry[key] = value
        if record.exc_info:
            entry["exception"] = self.formatException(record.exc_info)
        return json.dumps(entry, default=str)


def _formatter(structured: bool, colored: bool) -> logging.Formatter:
    if structured:
        return JsonLineFormatter()
    if colored:
        return ColoredFormatter('%(asctime)s | %(name)-28s | %(levelname)-8s | %(message)s', datefmt='%H:%M:%S')
    return logging.Formatter('%(asctime)s | %(name)s | %(levelname)s | %(message)s')


def setup_logger(
    name: str,
    level: Optional[str] = None,
    log_file: Optional[Path] = None,
    structured: Optional[bool] = None
) -> logging.Logger:
    """
    Logger `allocsim.<name>` with a stderr handler and an optional file handler.

    Unset arguments fall back to the global config. Handlers are attached
    once per name; later calls return the same logger untouched.
    """
    logger = logging.getLogger(f"{NAMESPACE}.{name}")
    if logger.handlers:
        return logger

    from src.utils.config import config

    level = level or config.log_level
    log_file = log_file if log_file is not None else config.log_file
    structured = config.structured_logs if structured is None else structured

    logger.setLevel(getattr(logging, level.upper()))
    logger.propagate = False

    # stdout carries CSV/JSON tables
    console = logging.StreamHandler(sys.stderr)
    console.setFormatter(_formatter(structured, colored=sys.stderr.isatty()))
    logger.addHandler(console)

    if log_file:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(_formatter(structured, colored=False))
        logger.addHandler(file_handler)

    return logger


class StageLogger:
    """
    Times one unit of CLI work (a table, a figure, a batch of trials).

    `work` is the number of agent-runs in the stage; when given, completion
    also logs the throughput.
    """

    def __init__(self, logger: logging.Logger, stage_name: str, stage_num: int = 0,
                 work: Optional[int] = None):
        self.logger = logger
        self.stage_name = stage_name
        self.stage_num = stage_num
        self.work = work
        self.start_time: Optional[float] = None
        self.duration: float = 0.0

    def _extra(self, **fields: Any) -> Dict[str, Any]:
        return {"stage": self.stage_name, "stage_num": self.stage_num, **fields}

    def __enter__(self):
        self.start_time = time.perf_counter()
        self.logger.info(f"[Stage {self.stage_num}] Starting: {self.stage_name}", extra=self._extra())
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.duration = time.perf_counter() - self.start_time
        extra = self._extra(seconds=round(self.duration, 4))

        if exc_type:
            self.logger.error(
                f"[Stage {self.stage_num}] Failed: {self.stage_name} ({self.duration:.2f}s) - {exc_val}",
                extra=extra,
            )
            return False

        message = f"[Stage {self.stage_num}] Completed: {self.stage_name} ({self.duration:.2f}s)"
        if self.work and self.duration > 0:
            rate = self.work / self.duration
            extra["agent_runs_per_s"] = round(rate, 1)
            message += f", {rate:,.0f} agent-runs/s"
        self.logger.info(message, extra=extra)
        return False
