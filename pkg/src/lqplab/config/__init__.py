"""Process settings, logging configuration and the experiment schema."""

from lqplab.config.experiment import load_experiment, parse_experiment
from lqplab.config.logging_config import setup_logging
from lqplab.config.settings import Settings, settings

__all__ = [
    "Settings",
    "load_experiment",
    "parse_experiment",
    "settings",
    "setup_logging",
]
