"""
Location and parsing of the [tool.glt-geomean] run defaults.
"""

from __future__ import annotations

import logging
import tomllib
from pathlib import Path
from typing import Any

from .errors import ConfigError

logger = logging.getLogger(__name__)

TOOL_SECTION = "glt-geomean"


def _load_pyproject(path: Path) -> dict[str, Any]:
    try:
        return tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as err:
        raise ConfigError(str(path), f"invalid TOML: {err}") from err


def find_settings_file(start: Path | None = None) -> Path | None:
    """
    Nearest pyproject.toml, from ``start`` upwards, with a [tool.glt-geomean] table.

    Files without the table are passed over, so a package checkout nested in
    a configured workspace still picks up the workspace settings.

    Args:
        start: Directory to search from (default: current directory)

    Returns:
        Path of the pyproject.toml file, or None if no directory has one

    Raises:
        ConfigError: If a pyproject.toml on the way is not valid TOML
    """
    origin = (start or Path.cwd()).resolve()
    for directory in (origin, *origin.parents):
        candidate = directory / "pyproject.toml"
        if candidate.is_file() and TOOL_SECTION in _load_pyproject(candidate).get("tool", {}):
            logger.debug(f"settings file: {candidate}")
            return candidate
    return None


def _int_list(value: Any, key: str, length: int | None = None) -> tuple[int, ...]:
    if not isinstance(value, list) or not all(
        isinstance(v, int) and not isinstance(v, bool) for v in value
    ):
        raise ConfigError(key, "expected an array of integers")
    if length is not None and len(value) != length:
        raise ConfigError(key, f"expected {length} integers, got {len(value)}")
    return tuple(value)


def _number(value: Any, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected a number, got {value!r}")
    return float(value)


def read_run_defaults(pyproject_path: Path) -> dict[str, Any]:
    """
    Read run defaults from the [tool.glt-geomean] section of pyproject.toml.

    Recognized keys are ``n-list``, ``grid``, ``threshold``, ``tol``, ``out``
    and ``threads``; they are returned under the matching ``RunConfig`` field
    names. A missing file or section gives an empty mapping; unknown keys are
    ignored.

    Args:
        pyproject_path: Path to the pyproject.toml file

    Returns:
        Mapping from ``RunConfig`` field names to values

    Raises:
        ConfigError: If the file is not valid TOML or a key has the wrong type
    """
    if not pyproject_path.exists():
        return {}

    section = _load_pyproject(pyproject_path).get("tool", {}).get(TOOL_SECTION, {})
    prefix = f"tool.{TOOL_SECTION}"
    defaults: dict[str, Any] = {}
    # TOML keys with hyphens are preserved as-is
    if "n-list" in section:
        defaults["n_list"] = _int_list(section["n-list"], f"{prefix}.n-list")
    if "grid" in section:
        defaults["grid"] = _int_list(section["grid"], f"{prefix}.grid", length=2)
    if "threshold" in section:
        defaults["threshold"] = _number(section["threshold"], f"{prefix}.threshold")
    if "tol" in section:
        defaults["tol"] = _number(section["tol"], f"{prefix}.tol")
    if "out" in section:
        if not isinstance(section["out"], str):
            raise ConfigError(f"{prefix}.out", "expected a string path")
        defaults["out_dir"] = pyproject_path.parent / section["out"]
    if "threads" in section:
        threads = section["threads"]
        if isinstance(threads, bool) or not isinstance(threads, int) or threads < 1:
            raise ConfigError(f"{prefix}.threads", "expected a positive integer")
        defaults["threads"] = threads
    if defaults:
        logger.debug(f"run defaults from {pyproject_path}: {defaults}")
    return defaults
