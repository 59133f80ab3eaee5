# Environment-driven configuration for solver defaults, tolerances and service settings
# Every field can be overridden through the environment or a local .env file
import os

from dotenv import load_dotenv

# Load environment variables from .env file without overriding actual environment vars
if os.path.exists(".env"):
    load_dotenv(".env", override=False)

from typing import List, Optional

from pydantic_settings import BaseSettings


def _flag(name: str, default: str) -> bool:
    return os.getenv(name, default).strip().lower() in ("1", "true", "yes")


class Settings(BaseSettings):
    # Project identification
    PROJECT_NAME: str = os.getenv("PROJECT_NAME", "polysparse")
    ENVIRONMENT: str = os.getenv("ENVIRONMENT", "development")

    # Logging
    POLYSPARSE_LOG: str = os.getenv("POLYSPARSE_LOG", "INFO")
    LOG_DIR: str = os.getenv("LOG_DIR", "logs")
    LOG_TO_FILE: bool = _flag("LOG_TO_FILE", "false")
    LOG_RETENTION_DAYS: int = int(os.getenv("LOG_RETENTION_DAYS", "7"))

    # Conic solver defaults
    SOLVER_MAX_ITERATIONS: int = int(os.getenv("SOLVER_MAX_ITERATIONS", "50000"))
    SOLVER_PRIMAL_TOL: float = float(os.getenv("SOLVER_PRIMAL_TOL", "1e-7"))
    SOLVER_DUAL_TOL: float = float(os.getenv("SOLVER_DUAL_TOL", "1e-7"))
    SOLVER_PENALTY: float = float(os.getenv("SOLVER_PENALTY", "1.0"))
    SOLVER_ADAPTIVE_PENALTY: bool = _flag("SOLVER_ADAPTIVE_PENALTY", "true")
    SOLVER_POLISH: bool = _flag("SOLVER_POLISH", "true")

    # Zero tests and verification
    ZERO_TOL: float = float(os.getenv("ZERO_TOL", "1e-6"))
    ZERO_COLUMN_RTOL: float = float(os.getenv("ZERO_COLUMN_RTOL", "1e-12"))
    SELECTIVE_STOP_TOL: float = float(os.getenv("SELECTIVE_STOP_TOL", "1e-8"))
    VERIFY_TOL: float = float(os.getenv("VERIFY_TOL", "1e-6"))
    GREEDY_RESIDUAL_FLOOR: float = float(os.getenv("GREEDY_RESIDUAL_FLOOR", "1e-9"))

    # Resource guards
    GREEDY_MAX_LS_SOLVES: int = int(os.getenv("GREEDY_MAX_LS_SOLVES", "1000000"))
    MAX_BASIS_SIZE: int = int(os.getenv("MAX_BASIS_SIZE", "2000000"))

    # Iterative reweighting
    REWEIGHT_ITERATIONS: int = int(os.getenv("REWEIGHT_ITERATIONS", "10"))
    REWEIGHT_EPS: float = float(os.getenv("REWEIGHT_EPS", "1e-3"))

    # Monte Carlo bench
    BENCH_THREADS: int = int(os.getenv("BENCH_THREADS", "1"))

    # CORS settings for the HTTP surface
    ALLOWED_ORIGINS: Optional[str] = os.getenv("ALLOWED_ORIGINS")

    @property
    def ALLOWED_ORIGINS_LIST(self) -> List[str]:
        """Parse comma-separated ALLOWED_ORIGINS into a list."""
        raw = self.ALLOWED_ORIGINS or ""
        return [o.strip() for o in raw.split(",") if o and o.strip()]

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        case_sensitive = True
        extra = "allow"  # Allow extra fields from .env file


settings = Settings()
