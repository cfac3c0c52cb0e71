# this_file: schemaroles/config.py
"""Command-line configuration and its precedence rules.

Values come from, in decreasing priority: explicit flags, ``SCHEMAROLES_*``
environment variables, the ``[schemaroles]`` table of a TOML file
(``--config`` or ``./schemaroles.toml``), built-in defaults.
"""

from __future__ import annotations

import os
import tomllib
from collections.abc import Mapping
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

from loguru import logger

from schemaroles.utils.logging import LOG_LEVELS

ENV_PREFIX = "SCHEMAROLES_"
CONFIG_FILENAME = "schemaroles.toml"
CONFIG_TABLE = "schemaroles"


class ConfigError(Exception):
    """Raised for invalid configuration values or files."""

    def __init__(self, message: str, source: str | None = None):
        """Initialize configuration error.

        Args:
            message: Error description
            source: Where the bad value came from (flag, env var, file)
        """
        self.source = source
        super().__init__(f"{message} (from {source})" if source else message)


@dataclass(frozen=True)
class CliConfig:
    """Resolved run parameters of the command-line tool.

    Attributes:
        frames_dir: PropBank frame corpus directory
        output_folder: Root of the mapping output tree
        concurrency: Mappers in flight
        max_rolesets_per_table: Mappings kept per table
        num_verbs: Candidate verbs per table
        min_confidence: Confidence floor
        max_iterations: Orchestrator rounds
        provider: Verb provider name or ``package.module:Factory`` path
        log_level: loguru level name
    """

    frames_dir: Path | None = None
    output_folder: Path = Path("output")
    concurrency: int = 4
    max_rolesets_per_table: int = 15
    num_verbs: int = 8
    min_confidence: float = 0.0
    max_iterations: int = 3
    provider: str = "baseline"
    log_level: str = "WARNING"

    def __post_init__(self) -> None:
        for name in ("concurrency", "max_rolesets_per_table", "num_verbs", "max_iterations"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not 0.0 <= self.min_confidence <= 1.0:
            raise ConfigError(f"min_confidence must be within [0, 1], got {self.min_confidence}")
        level = self.log_level.upper()
        if level not in LOG_LEVELS:
            raise ConfigError(
                f"Unknown log level {self.log_level!r}. Available: {list(LOG_LEVELS)}"
            )
        object.__setattr__(self, "log_level", level)

    def to_dict(self) -> dict[str, Any]:
        return {
            field.name: str(value) if isinstance(value, Path) else value
            for field in fields(self)
            for value in [getattr(self, field.name)]
        }


_FIELD_TYPES: dict[str, type] = {
    "frames_dir": Path,
    "output_folder": Path,
    "concurrency": int,
    "max_rolesets_per_table": int,
    "num_verbs": int,
    "min_confidence": float,
    "max_iterations": int,
    "provider": str,
    "log_level": str,
}


def _coerce(name: str, value: Any, source: str) -> Any:
    kind = _FIELD_TYPES[name]
    try:
        if kind is int:
            if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                raise ValueError(value)
            return int(value)
        if kind is float:
            if isinstance(value, bool):
                raise ValueError(value)
            return float(value)
        if kind is Path:
            return Path(str(value)).expanduser()
        return str(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid value {value!r} for {name}", source) from e


def read_config_file(path: Path) -> dict[str, Any]:
    """Read the ``[schemaroles]`` table of a TOML file.

    Raises:
        ConfigError: If the file is unreadable, not TOML or has unknown keys
    """
    try:
        with path.open("rb") as handle:
            document = tomllib.load(handle)
    except OSError as e:
        raise ConfigError(f"Cannot read config file: {e.strerror or e}", str(path)) from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"Invalid TOML: {e}", str(path)) from e

    table = document.get(CONFIG_TABLE, {})
    if not isinstance(table, dict):
        raise ConfigError(f"[{CONFIG_TABLE}] must be a table", str(path))
    unknown = sorted(set(table) - set(_FIELD_TYPES))
    if unknown:
        raise ConfigError(f"Unknown config keys: {unknown}", str(path))
    return {name: _coerce(name, value, str(path)) for name, value in table.items()}


def load_cli_config(
    flags: Mapping[str, Any] | None = None,
    env: Mapping[str, str] | None = None,
    config_file: Path | str | None = None,
    cwd: Path | None = None,
) -> CliConfig:
    """Resolve the CLI configuration.

    Args:
        flags: Explicit flag values keyed by CliConfig field; None values are ignored
        env: Environment (default: os.environ)
        config_file: Explicit TOML file; must exist when given
        cwd: Directory searched for schemaroles.toml (default: current directory)

    Returns:
        The merged, validated configuration

    Raises:
        ConfigError: On invalid values, unreadable files or unknown keys
    """
    env = os.environ if env is None else env
    values: dict[str, Any] = {}

    if config_file is not None:
        path = Path(config_file).expanduser()
        if not path.is_file():
            raise ConfigError("Config file not found", str(path))
        values.update(read_config_file(path))
    else:
        default_file = (cwd or Path.cwd()) / CONFIG_FILENAME
        if default_file.is_file():
            values.update(read_config_file(default_file))

    for name in _FIELD_TYPES:
        variable = ENV_PREFIX + name.upper()
        if env.get(variable):
            values[name] = _coerce(name, env[variable], variable)

    for name, value in (flags or {}).items():
        if name not in _FIELD_TYPES:
            raise ConfigError(f"Unknown option {name!r}")
        if value is not None:
            values[name] = _coerce(name, value, f"--{name}")

    config = CliConfig(**values)
    logger.debug(f"Resolved CLI config: {config.to_dict()}")
    return config
