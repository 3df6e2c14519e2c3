"""
User configuration for mnnts, with environment overrides.
"""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Union

from pydantic import BaseModel, Field, ValidationError, field_validator

from .config import JACOBI, ML

logger = logging.getLogger(__name__)

CONFIG_DIR = Path(os.environ.get("MNNTS_CONFIG_DIR", Path.home() / ".mnnts-config"))
CONFIG_FILE = CONFIG_DIR / "config.json"

DEFAULT_CONFIG = {
    "version": "1.0.0",
    "default_unit": "radians",
    "missing_token": "NA",
    "workers": "auto",
    "chunk_rows": "auto",
    "ml_max_iter": ML["max_iter"],
    "ml_tol": ML["tol"],
    "jacobi_max_dim": JACOBI["max_dim"],
}

ENV_OVERRIDES = {
    "MNNTS_DEFAULT_UNIT": "default_unit",
    "MNNTS_WORKERS": "workers",
}


class Settings(BaseModel):
    """Validated view of the configuration dictionary."""

    version: str = DEFAULT_CONFIG["version"]
    default_unit: Literal["degrees", "radians"] = "radians"
    missing_token: str = "NA"
    workers: Union[Literal["auto"], int] = "auto"
    chunk_rows: Union[Literal["auto"], int] = "auto"
    ml_max_iter: int = Field(default=ML["max_iter"], ge=1)
    ml_tol: float = Field(default=ML["tol"], gt=0)
    jacobi_max_dim: int = Field(default=JACOBI["max_dim"], ge=1)

    @field_validator("workers", "chunk_rows", mode="before")
    @classmethod
    def _auto_or_positive(cls, value):
        if isinstance(value, str) and value != "auto":
            value = int(value)
        if isinstance(value, int) and value < 1:
            raise ValueError("must be 'auto' or a positive integer")
        return value


def _config_file(config_dir: Optional[Path] = None) -> Path:
    if config_dir is None:
        config_dir = Path(os.environ.get("MNNTS_CONFIG_DIR", CONFIG_DIR))
    return Path(config_dir) / "config.json"


def load_config(config_dir: Optional[Path] = None) -> Dict[str, Any]:
    """Load config from file over the defaults, then apply environment overrides."""
    config = DEFAULT_CONFIG.copy()
    config_file = _config_file(config_dir)

    if config_file.exists():
        try:
            config.update(json.loads(config_file.read_text()))
        except (json.JSONDecodeError, OSError) as e:
            logger.warning("ignoring unreadable config %s: %s", config_file, e)

    for env_name, key in ENV_OVERRIDES.items():
        if env_name in os.environ:
            config[key] = os.environ[env_name]

    return config


def load_settings(config_dir: Optional[Path] = None) -> Settings:
    """Load and validate the configuration; invalid values fall back to defaults."""
    config = load_config(config_dir)
    try:
        return Settings.model_validate(config)
    except ValidationError as e:
        logger.warning("invalid configuration, using defaults: %s", e)
        return Settings()


def save_config(config: Dict[str, Any], config_dir: Optional[Path] = None) -> None:
    """Save config to file."""
    config_file = _config_file(config_dir)
    config_file.parent.mkdir(parents=True, exist_ok=True)

    with open(config_file, "w") as f:
        json.dump(config, f, indent=2)


def set_config_value(key: str, value: Any, config_dir: Optional[Path] = None) -> None:
    """Set a specific config value after validating the result."""
    config_file = _config_file(config_dir)
    stored = {}
    if config_file.exists():
        try:
            stored = json.loads(config_file.read_text())
        except json.JSONDecodeError:
            stored = {}

    stored[key] = value
    Settings.model_validate({**DEFAULT_CONFIG, **stored})
    save_config(stored, config_dir)


def show_config(config_dir: Optional[Path] = None) -> str:
    """Return formatted config."""
    return json.dumps(load_settings(config_dir).model_dump(), indent=2)
