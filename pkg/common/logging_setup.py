import logging
import os
import sys
from datetime import datetime, timedelta
from typing import Optional

from config import settings

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _resolve_level(level: Optional[str]) -> int:
    name = (level or settings.POLYSPARSE_LOG or "INFO").strip().upper()
    resolved = logging.getLevelName(name)
    return resolved if isinstance(resolved, int) else logging.INFO


def _prepare_log_dir() -> str:
    try:
        os.makedirs(settings.LOG_DIR, exist_ok=True)
        return settings.LOG_DIR
    except PermissionError:
        print(
            "Warning: Cannot create logs directory, using current directory for logs",
            file=sys.stderr,
        )
    except Exception as e:
        print(
            f"Warning: Error creating logs directory: {e}, using current directory for logs",
            file=sys.stderr,
        )
    return "."


def _cleanup_old_logs(log_dir: str) -> None:
    try:
        cutoff_date = datetime.now() - timedelta(days=settings.LOG_RETENTION_DAYS)
        for filename in os.listdir(log_dir):
            if filename.startswith("app_") and filename.endswith(".log"):
                file_path = os.path.join(log_dir, filename)
                file_time = datetime.fromtimestamp(os.path.getctime(file_path))
                if file_time < cutoff_date:
                    os.remove(file_path)
    except Exception as e:
        print(f"Warning: Could not clean up old log files: {e}", file=sys.stderr)


def setup_logging(level: Optional[str] = None, log_to_file: Optional[bool] = None) -> None:
    """Configure root logging: stderr always, plus a daily file when enabled.

    Level comes from POLYSPARSE_LOG unless given. stdout stays free for machine-readable output.
    """
    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]

    to_file = settings.LOG_TO_FILE if log_to_file is None else log_to_file
    if to_file:
        log_dir = _prepare_log_dir()
        _cleanup_old_logs(log_dir)
        today = datetime.now().strftime("%Y-%m-%d")
        handlers.append(logging.FileHandler(os.path.join(log_dir, f"app_{today}.log")))

    logging.basicConfig(
        level=_resolve_level(level),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )
