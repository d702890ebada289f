"""Logging configuration for lqplab."""

import copy
import logging.config
import os
from pathlib import Path
from typing import Any, Dict, Optional, Union

LOGGING_CONFIG: Dict[str, Any] = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "standard": {"format": "%(asctime)s [%(levelname)s] %(name)s: %(message)s"},
        "detailed": {
            "format": "%(asctime)s [%(levelname)s] %(name)s:%(lineno)d: %(message)s"
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "level": "INFO",
            "formatter": "standard",
            "stream": "ext://sys.stderr",
        },
    },
    "loggers": {
        "": {  # Root logger
            "handlers": ["console"],
            "level": "WARNING",
        },
        "lqplab": {
            "handlers": ["console"],
            "level": "INFO",
            "propagate": False,
        },
    },
}


def build_logging_config(
    level: str = "INFO", log_dir: Optional[Union[str, Path]] = None
) -> Dict[str, Any]:
    """Return a dictConfig mapping for the given level.

    Args:
        level: Level for the ``lqplab`` logger and the console handler
        log_dir: Optional directory for a rotating debug log file

    Returns:
        A configuration dictionary accepted by ``logging.config.dictConfig``
    """
    config = copy.deepcopy(LOGGING_CONFIG)
    level = level.upper()
    config["handlers"]["console"]["level"] = level
    config["loggers"]["lqplab"]["level"] = level
    if log_dir is not None:
        logs_dir = Path(log_dir)
        logs_dir.mkdir(parents=True, exist_ok=True)
        config["handlers"]["debug_file"] = {
            "class": "logging.handlers.RotatingFileHandler",
            "level": "DEBUG",
            "formatter": "detailed",
            "filename": os.path.join(logs_dir, "lqplab_debug.log"),
            "maxBytes": 10485760,  # 10MB
            "backupCount": 3,
            "encoding": "utf8",
        }
        config["loggers"]["lqplab"]["handlers"].append("debug_file")
        config["loggers"]["lqplab"]["level"] = "DEBUG"
    return config


def setup_logging(
    level: str = "INFO", log_dir: Optional[Union[str, Path]] = None
) -> None:
    """Set up logging configuration."""
    logging.config.dictConfig(build_logging_config(level, log_dir))
