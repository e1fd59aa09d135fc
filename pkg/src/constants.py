"""Constants for sdohkit. Runtime settings live in config/default.json."""

from __future__ import annotations

TOOLKIT_VERSION = "0.1.0"
SCHEMA_FORMAT_VERSION = 1

LOGGER_NAME = "sdohkit"

NOTE_SUFFIX = ".txt"
ANN_SUFFIX = ".ann"

MODES = ("standoff", "inline")
LOG_FORMATS = ("json", "table", "csv")
REPORT_FORMATS = ("table", "csv", "json")

# Error message templates
ERRORS = {
    "SCHEMA_SYNTAX": "schema syntax error at line {line}, column {column}: {message}",
    "SCHEMA_INVARIANT": "invariant violation: {rule}",
    "UNKNOWN_LABEL": "unknown argument label: {label}",
    "STANDOFF_SYNTAX": "line {line_no}: {message}",
    "DUPLICATE_ID": "line {line_no}: duplicate id {frame_id}",
    "INCONSISTENT_DOC": "document has {count} structural violation(s); first: {first}",
    "OVERLAPPING_SPANS": "spans {first} and {second} overlap and cannot be written as inline markers",
    "DEGENERATE_SPAN": "degenerate span ({start}, {end}): start must be < end",
    "NOTE_MISMATCH": "gold and predicted documents reference different note texts",
    "UNKNOWN_FORMAT": "unknown report format: {fmt} (expected one of: {choices})",
    "UNKNOWN_CRITERIA": "unknown match criteria: {criteria}",
    "MISSING_API_KEY": "environment variable {env} is not set; it must hold the API key",
    "RETRIES_EXHAUSTED": "request failed after {attempts} attempt(s); last status {status}",
    "MALFORMED_RESPONSE": "malformed chat-completion response: missing {field}",
    "FILE_NOT_FOUND": "NOT_FOUND: {path}",
    "NOT_UTF8": "{path} is not valid UTF-8: {reason}",
    "INVALID_MODE": "mode must be one of: {modes}",
}
