import os
import logging
from pathlib import Path
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Simulator configuration settings loaded from RINDLER_SIM_* environment variables"""

    # Parallelism
    threads: int = os.cpu_count() or 1

    # Truncation
    tail_tol: float = 1e-12
    max_dimension: int = 4_000_000
    frame_padding: int = 4

    # Numerics
    series_max_terms: int = 500
    hermiticity_tol: float = 1e-10

    # Output
    output_dir: str = "reports"
    log_level: str = "INFO"

    model_config = SettingsConfigDict(env_prefix="RINDLER_SIM_", env_file=".env", extra="ignore")

    # Computed properties
    @property
    def worker_count(self) -> int:
        """Number of sweep workers, never below one"""
        return max(1, self.threads)

    @property
    def output_path(self) -> Path:
        """Output directory as a Path"""
        return Path(self.output_dir)

    def validate_config(self) -> None:
        """Validate numeric settings and prepare the output directory"""
        if self.threads < 1:
            raise ValueError("RINDLER_SIM_THREADS must be at least 1")
        if not 0.0 < self.tail_tol < 1.0:
            raise ValueError("RINDLER_SIM_TAIL_TOL must lie in (0, 1)")
        if self.max_dimension < 1:
            raise ValueError("RINDLER_SIM_MAX_DIMENSION must be positive")
        if self.frame_padding < 0:
            raise ValueError("RINDLER_SIM_FRAME_PADDING must be non-negative")
        if self.series_max_terms < 1:
            raise ValueError("RINDLER_SIM_SERIES_MAX_TERMS must be positive")
        if self.hermiticity_tol <= 0.0:
            raise ValueError("RINDLER_SIM_HERMITICITY_TOL must be positive")

        try:
            os.makedirs(self.output_dir, exist_ok=True)
        except Exception as e:
            logging.warning(f"Could not create output directory: {e}")


settings = Settings()
