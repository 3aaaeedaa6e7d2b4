"""
Settings management for resochi
"""

import os
import json
import logging
import tempfile
from dataclasses import dataclass, replace
from typing import Any, Dict, Optional, Tuple

from utils.constants import (
    APP_CONFIG_DIR_ENV,
    APP_NAME,
    APP_THREADS_ENV,
    DEFAULT_COEFF_BOUND,
    DEFAULT_FORMAT,
    DEFAULT_K_MAX,
    DEFAULT_N_LIST,
    DEFAULT_SEED,
    DEFAULT_THREADS,
    DEFAULT_TOL,
    SUPPORTED_FORMATS
)
from utils.helpers import ensure_directory_exists

# Set up logging
logger = logging.getLogger(__name__)

# Settings that feed a RunConfig; everything else in the file is bookkeeping
RUN_KEYS = ("tol", "coeff_bound", "k_max", "n_list", "format", "seed", "threads")


def default_config_dir() -> str:
    """~/.resochi unless RESOCHI_CONFIG_DIR points elsewhere"""
    return os.environ.get(APP_CONFIG_DIR_ENV) or os.path.expanduser(f"~/.{APP_NAME}")


@dataclass(frozen=True)
class RunConfig:
    """
    Effective options of one CLI run: defaults, then the settings file,
    then command-line overrides.
    """

    command: str = ""
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    tol: float = DEFAULT_TOL
    coeff_bound: int = DEFAULT_COEFF_BOUND
    k_max: int = DEFAULT_K_MAX
    n_list: Tuple[int, ...] = DEFAULT_N_LIST
    format: str = DEFAULT_FORMAT
    seed: int = DEFAULT_SEED
    threads: int = DEFAULT_THREADS

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.coeff_bound < 1:
            raise ValueError(f"coeff_bound must be at least 1, got {self.coeff_bound}")
        if self.k_max < 1:
            raise ValueError(f"k_max must be at least 1, got {self.k_max}")
        if not self.n_list or any(N < 1 for N in self.n_list):
            raise ValueError(f"n_list must hold positive integers, got {self.n_list}")
        if self.format not in SUPPORTED_FORMATS:
            raise ValueError(f"Unsupported format {self.format!r}; expected one of {SUPPORTED_FORMATS}")
        if self.threads < 1:
            raise ValueError(f"threads must be at least 1, got {self.threads}")
        object.__setattr__(self, "n_list", tuple(int(N) for N in self.n_list))

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        """Copy with every override that is not None applied"""
        return replace(self, **{key: value for key, value in overrides.items() if value is not None})


def _stored_value(key: str, value: Any) -> Any:
    return tuple(value) if key == "n_list" else value


class ConfigManager:
    """
    Class for managing persistent settings

    The settings file is a flat JSON object. A missing file is written with
    the defaults; an unreadable one is left alone and the defaults are used.
    """

    def __init__(self, config_dir: Optional[str] = None):
        """Initialize the config manager"""
        self.config_dir = config_dir or default_config_dir()
        self.config_file = os.path.join(self.config_dir, "config.json")
        self.settings = self._load_settings()

    def _default_settings(self) -> Dict[str, Any]:
        defaults = RunConfig()
        settings = {key: getattr(defaults, key) for key in RUN_KEYS}
        settings["n_list"] = list(defaults.n_list)
        settings["log_directory"] = os.path.join(self.config_dir, "logs")
        return settings

    def _load_settings(self) -> Dict[str, Any]:
        """
        Read the settings file, filling in defaults for absent keys

        Returns:
            Dictionary containing the settings
        """
        settings = self._default_settings()
        if not os.path.exists(self.config_file):
            self._save_settings(settings)
            return settings

        try:
            with open(self.config_file, 'r', encoding="utf-8") as f:
                stored = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            logger.error(f"Unreadable settings file {self.config_file}: {e}")
            return settings
        if not isinstance(stored, dict):
            logger.error(f"Settings file {self.config_file} does not hold a JSON object")
            return settings

        settings.update(stored)
        return settings

    def _save_settings(self, settings: Dict[str, Any]) -> bool:
        """
        Write the settings file through a temporary file in the same directory

        Returns:
            True if the settings were saved, False otherwise
        """
        if not ensure_directory_exists(self.config_dir):
            return False
        try:
            fd, temp_path = tempfile.mkstemp(dir=self.config_dir, suffix=".tmp")
            with os.fdopen(fd, 'w', encoding="utf-8") as f:
                json.dump(settings, f, indent=4)
            os.replace(temp_path, self.config_file)
            return True
        except OSError as e:
            logger.error(f"Could not write settings to {self.config_file}: {e}")
            return False

    def get_setting(self, key: str, default: Any = None) -> Any:
        """Stored value of a setting, or default"""
        return self.settings.get(key, default)

    def set_setting(self, key: str, value: Any) -> bool:
        """
        Store one setting and persist the file

        Returns:
            True if the file was written
        """
        self.settings[key] = value
        return self._save_settings(self.settings)

    def log_file(self) -> str:
        """Path of the rotating log file"""
        return os.path.join(self.get_setting("log_directory"), f"{APP_NAME}.log")

    def _valid_stored(self) -> Dict[str, Any]:
        valid = {}
        for key in RUN_KEYS:
            if key not in self.settings:
                continue
            value = self.settings[key]
            try:
                RunConfig(**{key: _stored_value(key, value)})
            except (TypeError, ValueError) as e:
                logger.warning(f"Ignoring stored {key}={value!r}: {e}")
                continue
            valid[key] = _stored_value(key, value)
        return valid

    def run_config(self, command: str = "", **overrides: Any) -> RunConfig:
        """
        Build the RunConfig for a command

        Stored values that fail validation are dropped one by one. The
        RESOCHI_THREADS variable wins over the settings file.

        Args:
            command: Subcommand name
            **overrides: Command-line values (None means not given)

        Returns:
            RunConfig
        """
        stored = self._valid_stored()
        threads_env = os.environ.get(APP_THREADS_ENV)
        if threads_env:
            try:
                threads = int(threads_env)
                if threads < 1:
                    raise ValueError(threads_env)
                stored["threads"] = threads
            except ValueError:
                logger.warning(f"Ignoring {APP_THREADS_ENV}={threads_env!r}: not a positive integer")
        return RunConfig(command=command).with_overrides(**stored).with_overrides(**overrides)
