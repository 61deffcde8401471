"""
Configuration management for rackforge.
"""

import json
import logging
import math
import os
from pathlib import Path
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)

SEED_ENV_VAR = "RACKFORGE_SEED"
CONFIG_ENV_VAR = "RACKFORGE_CONFIG"

DEFAULTS: Dict[str, Any] = {
    "samples": 256,
    "seed": 0,
    "fd_step": 1e-3,
    "tol": 1e-9,
    "bracket_tol": 1e-4,
    "tau": math.pi,
    "tau_prime": math.pi / 2,
    "sample_scale": 1.0,
    "gauge_factor": 2.0,
    "fiber_base_points": 32,
    "log_level": "INFO",
}


class RackforgeConfig:
    """Configuration manager for verification and integration runs."""

    def __init__(self, config_path: Optional[str] = None):
        if config_path is None:
            config_path = os.environ.get(CONFIG_ENV_VAR)
        self.config_path = Path(config_path) if config_path else None
        self._config: Dict[str, Any] = {}
        self._load_config()

    def _load_config(self):
        """Read the JSON file when present, then fill defaults and apply the seed override."""
        if self.config_path and self.config_path.exists():
            try:
                with open(self.config_path, "r") as f:
                    self._config = json.load(f)
                logger.info(f"Read settings from {self.config_path}")
            except (OSError, json.JSONDecodeError) as e:
                logger.warning(f"Ignoring unreadable settings file {self.config_path}: {e}")
                self._config = {}
            if not isinstance(self._config, dict):
                logger.warning(f"Settings file {self.config_path} is not a JSON object, using defaults")
                self._config = {}
        else:
            if self.config_path:
                logger.warning(f"Config file {self.config_path} not found, using defaults")
            self._config = {}

        for key, value in DEFAULTS.items():
            self._config.setdefault(key, value)

        env_seed = os.environ.get(SEED_ENV_VAR)
        if env_seed is not None:
            try:
                self._config["seed"] = int(env_seed)
            except ValueError:
                logger.warning(f"Ignoring non-integer {SEED_ENV_VAR}={env_seed!r}")

    def get(self, key: str, default: Any = None) -> Any:
        return self._config.get(key, default)

    @property
    def seed(self) -> int:
        return int(self._config["seed"])

    @property
    def samples(self) -> int:
        return int(self._config["samples"])

    @property
    def log_level(self) -> str:
        return str(self._config["log_level"]).upper()

    def as_dict(self) -> Dict[str, Any]:
        return dict(self._config)

    def reload(self):
        """Reload configuration from file and environment."""
        self._load_config()


# Default instance; honours RACKFORGE_CONFIG
config = RackforgeConfig()
