"""Configuration management for allocsim."""
from pathlib import Path
from typing import List, Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Config(BaseSettings):
    """Central configuration, overridable through ALLOCSIM_* environment variables."""

    model_config = SettingsConfigDict(env_prefix="ALLOCSIM_", extra="ignore")

    # =========================================================================
    # PATHS
    # =========================================================================
    artifacts_dir: Path = Field(default_factory=lambda: Path.cwd() / "artifacts")

    @property
    def outputs_dir(self) -> Path:
        return self.artifacts_dir / "outputs"

    @property
    def run_logs_dir(self) -> Path:
        return self.artifacts_dir / "run_logs"

    # =========================================================================
    # SIMULATION SETTINGS
    # =========================================================================
    threads: int = 1  # Fallback for --threads
    default_seed: int = 20240601  # Fixed, so bare invocations reproduce
    max_workload: int = 500_000_000  # n * trials cap, --allow-large overrides

    # =========================================================================
    # LIMIT EVALUATION SETTINGS
    # =========================================================================
    s_max: int = 200  # Rank truncation for u-table and q_s sums
    r_max: int = 60  # Rounds reported by default
    quad_tol: float = 1e-10  # Absolute quadrature tolerance
    theta_grid_step: float = 0.05

    # =========================================================================
    # LOGGING
    # =========================================================================
    log_level: str = "INFO"
    log_file: Optional[Path] = None
    structured_logs: bool = False

    @field_validator("threads")
    @classmethod
    def _positive_threads(cls, value: int) -> int:
        if value < 1:
            raise ValueError("threads must be >= 1")
        return value

    @field_validator("theta_grid_step")
    @classmethod
    def _step_in_range(cls, value: float) -> float:
        if not 0.0 < value <= 1.0:
            raise ValueError("theta_grid_step must be in (0, 1]")
        return value

    def default_theta_grid(self) -> List[float]:
        """Grid {0, step, 2*step, ..., 1}."""
        steps = int(round(1.0 / self.theta_grid_step))
        return [round(i / steps, 12) for i in range(steps + 1)]

    def ensure_dirs(self) -> None:
        """Create output directories if they don't exist."""
        self.outputs_dir.mkdir(parents=True, exist_ok=True)
        self.run_logs_dir.mkdir(parents=True, exist_ok=True)

    def print_status(self) -> None:
        """Print configuration status."""
        print("\n=== allocsim configuration ===")
        print(f"Artifacts Dir: {self.artifacts_dir}")
        print(f"Threads: {self.threads}")
        print(f"Default Seed: {self.default_seed}")
        print(f"S_max: {self.s_max}  R_max: {self.r_max}  quad_tol: {self.quad_tol:g}")
        print(f"Workload Cap: {self.max_workload:,}")
        print(f"Log Level: {self.log_level}")
        print("==============================\n")


# Global config instance
config = Config()
