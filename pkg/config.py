import json
import logging
import os
import sys
from datetime import datetime, timezone
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

load_dotenv()


def _flag(name: str, default: str) -> bool:
    return os.getenv(name, default).lower() == "true"


PROJECT_ROOT = os.path.dirname(os.path.abspath(__file__))
PRESETS_DIR = os.path.join(PROJECT_ROOT, "experiments", "presets")

OUTPUT_ROOT = os.getenv("OUTPUT_ROOT", "runs")
REFERENCE_CACHE_DIR = os.getenv("REFERENCE_CACHE_DIR", os.path.join(OUTPUT_ROOT, "_references"))
SWEEP_WORKERS = int(os.getenv("SWEEP_WORKERS", "1"))

TAPE_CHECK_FINITE = _flag("TAPE_CHECK_FINITE", "true")
NTK_PARAMETER_BUDGET = int(os.getenv("NTK_PARAMETER_BUDGET", "5000"))
SOLVER_BLOWUP_THRESHOLD = float(os.getenv("SOLVER_BLOWUP_THRESHOLD", "1e6"))

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# package name -> level; the numeric core is quiet unless asked
LOG_LEVELS = {
    package: os.getenv(f"{package.upper()}_LOG_LEVEL", default).upper()
    for package, default in (
        ("autodiff", "WARNING"),
        ("jetnet", "WARNING"),
        ("spectral", "WARNING"),
        ("pdezoo", "WARNING"),
        ("losses", "INFO"),
        ("refsolve", "INFO"),
        ("analysis", "INFO"),
        ("experiments", "INFO"),
    )
}

LOG_TO_FILE = _flag("LOG_TO_FILE", "false")
LOG_FILE_PATH = os.getenv("LOG_FILE_PATH", "logs/spectral_pinn.log")
LOG_MAX_SIZE = int(os.getenv("LOG_MAX_SIZE", "10485760"))
LOG_BACKUP_COUNT = int(os.getenv("LOG_BACKUP_COUNT", "5"))
LOG_USE_JSON_FORMAT = _flag("LOG_USE_JSON_FORMAT", "false")


class JSONFormatter(logging.Formatter):
    def format(self, record):
        entry = {
            "timestamp": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        if record.exc_info:
            entry["exception"] = self.formatException(record.exc_info)
        return json.dumps(entry)


def _level(name: str) -> int:
    return getattr(logging, name, logging.INFO)


def _file_handler(formatter: logging.Formatter) -> Optional[logging.Handler]:
    try:
        Path(LOG_FILE_PATH).parent.mkdir(parents=True, exist_ok=True)
        handler = RotatingFileHandler(LOG_FILE_PATH, maxBytes=LOG_MAX_SIZE, backupCount=LOG_BACKUP_COUNT)
    except OSError as e:
        logger.warning(f"File logging disabled, cannot open {LOG_FILE_PATH}: {e}")
        return None
    handler.setFormatter(formatter)
    handler.setLevel(_level(LOG_LEVEL))
    return handler


def setup_logging():
    """Console (and optionally rotating file) logging with per-package levels. Safe to call twice."""
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)

    formatter = JSONFormatter() if LOG_USE_JSON_FORMAT else logging.Formatter(LOG_FORMAT)
    console = logging.StreamHandler(sys.stdout)
    console.setFormatter(formatter)
    console.setLevel(_level(LOG_LEVEL))
    root.addHandler(console)

    if LOG_TO_FILE:
        handler = _file_handler(formatter)
        if handler is not None:
            root.addHandler(handler)

    root.setLevel(_level(LOG_LEVEL))
    for package, level in LOG_LEVELS.items():
        if hasattr(logging, level):
            logging.getLogger(package).setLevel(getattr(logging, level))
    logging.getLogger("asyncio").setLevel(logging.WARNING)

    logger.info(f"Logging at {LOG_LEVEL} (file: {LOG_TO_FILE}, json: {LOG_USE_JSON_FORMAT})")
    logger.info(
        f"Outputs under {OUTPUT_ROOT}, reference cache {REFERENCE_CACHE_DIR}, "
        f"{SWEEP_WORKERS} sweep worker(s), NTK budget {NTK_PARAMETER_BUDGET} parameters"
    )
