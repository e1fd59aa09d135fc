"""Configuration loader for sdohkit with CLI override support."""

from __future__ import annotations

import copy
import json
from pathlib import Path
from typing import Any, Dict, Optional
from dataclasses import dataclass, field

from .error_handling import ConfigurationError

# Global context for configuration so that callers who don't
# thread config_file/overrides explicitly still respect CLI inputs
_GLOBAL_CONFIG_FILE: Optional[str] = None
_GLOBAL_OVERRIDES: Optional[Dict[str, Any]] = None


@dataclass
class ToolkitConfig:
    """Main configuration class for sdohkit."""
    llm: Dict[str, Any] = field(default_factory=dict)
    runner: Dict[str, Any] = field(default_factory=dict)
    inline: Dict[str, Any] = field(default_factory=dict)
    scoring: Dict[str, Any] = field(default_factory=dict)
    logging: Dict[str, Any] = field(default_factory=dict)
    paths: Dict[str, Any] = field(default_factory=dict)


def _find_project_root() -> Path:
    """Find the project root directory."""
    current = Path(__file__).parent
    while current.parent != current:
        if (current / "config" / "default.json").exists():
            return current
        current = current.parent
    # Fallback to the src parent directory
    return Path(__file__).parent.parent


def _read_json(path: Path) -> Dict[str, Any]:
    if not path.exists():
        raise ConfigurationError(f"Configuration file not found: {path}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ConfigurationError(f"Configuration file {path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigurationError(f"Configuration file {path} must contain a JSON object")
    return data


def load_config(
    config_file: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None
) -> ToolkitConfig:
    """Load configuration from file with optional CLI overrides.

    A custom file is layered over config/default.json, so it only needs the
    keys it changes.

    Args:
        config_file: Path to custom config file
        overrides: Dictionary of CLI overrides in dot notation (e.g., "llm.temperature": 0.2)

    Returns:
        ToolkitConfig instance
    """
    # Fall back to globally set context when explicit args are not provided
    if config_file is None and _GLOBAL_CONFIG_FILE is not None:
        config_file = _GLOBAL_CONFIG_FILE
    if overrides is None and _GLOBAL_OVERRIDES is not None:
        overrides = _GLOBAL_OVERRIDES

    config_data = _read_json(_find_project_root() / "config" / "default.json")
    if config_file:
        config_data = _deep_merge(config_data, _read_json(Path(config_file)))

    # Apply CLI overrides
    if overrides:
        config_data = _apply_overrides(config_data, overrides)

    return ToolkitConfig(
        llm=config_data.get("llm", {}),
        runner=config_data.get("runner", {}),
        inline=config_data.get("inline", {}),
        scoring=config_data.get("scoring", {}),
        logging=config_data.get("logging", {}),
        paths=config_data.get("paths", {}),
    )


def set_global_config_context(*, config_file: Optional[str], overrides: Optional[Dict[str, Any]]) -> None:
    """Set global default context for config loading throughout the process."""
    global _GLOBAL_CONFIG_FILE, _GLOBAL_OVERRIDES
    _GLOBAL_CONFIG_FILE = config_file
    _GLOBAL_OVERRIDES = overrides


def _deep_merge(base: Dict[str, Any], extra: Dict[str, Any]) -> Dict[str, Any]:
    result = copy.deepcopy(base)
    for key, value in extra.items():
        if key.startswith("_"):
            continue
        if isinstance(value, dict) and isinstance(result.get(key), dict):
            result[key] = _deep_merge(result[key], value)
        else:
            result[key] = value
    return result


def _apply_overrides(config_data: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Apply CLI overrides to config data using dot notation."""
    result = copy.deepcopy(config_data)

    for key, value in overrides.items():
        # Split dot notation key (e.g., "llm.max_retries")
        parts = key.split(".")
        current = result

        # Navigate to the parent of the target key
        for part in parts[:-1]:
            if not isinstance(current.get(part), dict):
                current[part] = {}
            current = current[part]

        current[parts[-1]] = value

    return result


def parse_config_overrides(config_overrides: Optional[list[str]]) -> Dict[str, Any]:
    """Parse CLI configuration overrides in key=value format.

    Args:
        config_overrides: List of strings in format "key=value" or "nested.key=value"

    Returns:
        Dictionary of parsed overrides
    """
    if not config_overrides:
        return {}

    overrides: Dict[str, Any] = {}
    for override in config_overrides:
        if "=" not in override:
            raise ConfigurationError(f"Invalid --config value {override!r}: expected key=value")

        key, value = override.split("=", 1)
        key = key.strip()
        value = value.strip()

        # Try to convert value to appropriate type
        if value.lower() in ("true", "false"):
            value = value.lower() == "true"
        elif value.lower() == "null":
            value = None
        elif value.isdigit():
            value = int(value)
        elif value.replace(".", "", 1).isdigit():
            value = float(value)
        # Otherwise keep as string

        overrides[key] = value

    return overrides


def get_setting(config: ToolkitConfig, section: str, name: str, default: Any) -> Any:
    """Get a section setting with fallback to default."""
    values = getattr(config, section, None) or {}
    value = values.get(name, default)
    return default if value is None and default is not None else value


def load_prompt(prompt_name: str, project_root: Optional[Path] = None) -> str:
    """Load a prompt template from the prompts directory."""
    if project_root is None:
        prompt_path = Path(__file__).parent / "prompts" / f"{prompt_name}.md"
    else:
        prompt_path = project_root / "src" / "prompts" / f"{prompt_name}.md"

    if not prompt_path.exists():
        raise ConfigurationError(f"Prompt file not found: {prompt_path}")

    return prompt_path.read_text(encoding='utf-8').strip()
