from __future__ import annotations

import os
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

from .config_loader import ToolkitConfig, get_setting, load_config
from .error_handling import ConfigurationError, MissingApiKeyError, format_error_message


@dataclass(frozen=True)
class LlmConfig:
    endpoint: str
    model: str
    temperature: float = 0.0
    max_retries: int = 3
    backoff_base: float = 1.0
    api_key_env: str = "LLM_API_KEY"
    timeout: float = 120.0
    max_tokens: Optional[int] = None

    def __post_init__(self) -> None:
        if not self.endpoint:
            raise ConfigurationError("llm.endpoint is required")
        if not self.model:
            raise ConfigurationError("llm.model is required")
        if self.max_retries < 0:
            raise ConfigurationError(f"llm.max_retries must be >= 0, got {self.max_retries}")
        if self.temperature < 0:
            raise ConfigurationError(f"llm.temperature must be >= 0, got {self.temperature}")
        if self.backoff_base < 0:
            raise ConfigurationError(f"llm.backoff_base must be >= 0, got {self.backoff_base}")

    @staticmethod
    def from_config(config: Optional[ToolkitConfig] = None, **overrides: Any) -> "LlmConfig":
        """Build from the `llm` config section; non-None keyword overrides win (CLI flags)."""
        if config is None:
            config = load_config()
        values: Dict[str, Any] = {
            "endpoint": get_setting(config, "llm", "endpoint", ""),
            "model": get_setting(config, "llm", "model", ""),
            "temperature": float(get_setting(config, "llm", "temperature", 0.0)),
            "max_retries": int(get_setting(config, "llm", "max_retries", 3)),
            "backoff_base": float(get_setting(config, "llm", "backoff_base", 1.0)),
            "api_key_env": get_setting(config, "llm", "api_key_env", "LLM_API_KEY"),
            "timeout": float(get_setting(config, "llm", "timeout", 120.0)),
            "max_tokens": get_setting(config, "llm", "max_tokens", None),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return LlmConfig(**values)

    def api_key(self) -> str:
        """Read the bearer token from the configured environment variable."""
        key = os.environ.get(self.api_key_env, "")
        if not key:
            raise MissingApiKeyError(format_error_message("MISSING_API_KEY", env=self.api_key_env))
        return key

    def to_manifest(self) -> Dict[str, Any]:
        """Config as recorded in run manifests; the key itself is never written."""
        return asdict(self)
