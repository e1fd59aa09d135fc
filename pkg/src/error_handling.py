"""Centralized error handling and custom exceptions for sdohkit."""

from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional

from .constants import ERRORS, LOGGER_NAME


class ToolkitError(Exception):
    """Base exception for sdohkit errors."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.details = details or {}


class ConfigurationError(ToolkitError):
    """Raised when configuration is invalid or missing."""
    pass


class SchemaError(ToolkitError):
    """Raised when a schema document cannot be loaded or queried."""
    pass


class SchemaSyntaxError(SchemaError):
    """Raised when a schema document is not well-formed JSON."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(
            format_error_message("SCHEMA_SYNTAX", line=line, column=column, message=message),
            {"line": line, "column": column},
        )
        self.line = line
        self.column = column


class SchemaInvariantError(SchemaError):
    """Raised when a schema breaks one of its invariants."""

    def __init__(self, rule: str):
        super().__init__(format_error_message("SCHEMA_INVARIANT", rule=rule), {"rule": rule})
        self.rule = rule


class StandoffParseError(ToolkitError):
    """Raised in strict mode when a standoff line cannot be parsed."""

    def __init__(self, message: str, line_no: int):
        super().__init__(message, {"line_no": line_no})
        self.line_no = line_no


class StandoffValidationError(ToolkitError):
    """Raised when a document breaks structural invariants."""

    def __init__(self, message: str, violations: list):
        super().__init__(message, {"violations": [str(v) for v in violations]})
        self.violations = violations


class InlineFormatError(ToolkitError):
    """Raised when a document cannot be rendered as inline markers."""
    pass


class LinkError(ToolkitError):
    """Raised on invalid linker input."""
    pass


class ScoringError(ToolkitError):
    """Raised when two documents cannot be scored against each other."""
    pass


class InputEncodingError(ToolkitError):
    """Raised when an input file is not valid UTF-8."""

    def __init__(self, path: str | Path, reason: str):
        super().__init__(format_error_message("NOT_UTF8", path=path, reason=reason), {"path": str(path)})
        self.path = str(path)


class FixtureError(ToolkitError):
    """Raised when the bundled fixtures fail offset verification."""
    pass


class PromptError(ToolkitError):
    """Raised when a prompt bundle is inconsistent."""
    pass


class LLMError(ToolkitError):
    """Raised when chat-completion calls fail."""
    pass


class MissingApiKeyError(LLMError):
    """Raised when the API key environment variable is unset."""
    pass


class RetriesExhaustedError(LLMError):
    """Raised when every retry attempt failed."""

    def __init__(self, message: str, attempts: int, status: Optional[int]):
        super().__init__(message, {"attempts": attempts, "status": status})
        self.attempts = attempts
        self.status = status


class MalformedResponseError(LLMError):
    """Raised when a response body lacks the chat-completion structure."""

    def __init__(self, field: str):
        super().__init__(format_error_message("MALFORMED_RESPONSE", field=field), {"field": field})
        self.field = field


def format_error_message(error_key: str, **kwargs) -> str:
    """Format an error message from the constants."""
    try:
        template = ERRORS.get(error_key, "Unknown error")
        return template.format(**kwargs)
    except KeyError as e:
        return f"Error formatting message for '{error_key}': missing key {e}"


def handle_file_operation_error(error: Exception, file_path: str | Path) -> str:
    """Handle common file operation errors and return user-friendly message."""
    if isinstance(error, FileNotFoundError):
        return format_error_message("FILE_NOT_FOUND", path=file_path)
    elif isinstance(error, PermissionError):
        return f"Permission denied: {file_path}"
    elif isinstance(error, OSError):
        return f"OS error accessing {file_path}: {error}"
    else:
        return f"Unexpected error with {file_path}: {error}"


def setup_logging(level: int = logging.INFO, log_file: Optional[Path] = None) -> None:
    """Set up centralized logging for sdohkit; diagnostics always go to stderr."""
    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    root_logger = logging.getLogger(LOGGER_NAME)
    root_logger.setLevel(level)

    # Repeated CLI invocations in one process must not stack handlers
    for handler in list(root_logger.handlers):
        if getattr(handler, "_sdohkit", False):
            root_logger.removeHandler(handler)
            handler.close()

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    console_handler._sdohkit = True  # type: ignore[attr-defined]
    root_logger.addHandler(console_handler)

    if log_file:
        try:
            log_file.parent.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(log_file, encoding="utf-8")
            file_handler.setFormatter(formatter)
            file_handler._sdohkit = True  # type: ignore[attr-defined]
            root_logger.addHandler(file_handler)
        except Exception as e:
            root_logger.warning(f"Could not set up file logging: {e}")

