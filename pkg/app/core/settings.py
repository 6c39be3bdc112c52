import logging
import os
from pathlib import Path

logger = logging.getLogger(__name__)


def get_thread_limit() -> int:
    raw = os.getenv("QSEAL_THREADS", "").strip()
    default = os.cpu_count() or 1
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"QSEAL_THREADS={raw!r} не является числом, используется {default}")
        return default
    if value < 1:
        logger.warning(f"QSEAL_THREADS={value} меньше 1, используется {default}")
        return default
    return value


def get_log_level() -> str:
    raw = os.getenv("QSEAL_LOG_LEVEL", "INFO").strip().upper()
    if raw not in {"DEBUG", "INFO", "WARNING", "ERROR"}:
        return "INFO"
    return raw


def get_data_dir() -> Path:
    raw = os.getenv("QSEAL_DATA_DIR", "").strip()
    return Path(raw) if raw else Path.cwd()
