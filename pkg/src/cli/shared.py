"""Shared utilities for CLI commands."""

from __future__ import annotations

import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import typer
from dotenv import load_dotenv

from ..config_loader import ToolkitConfig, get_setting, load_config, parse_config_overrides, set_global_config_context
from ..constants import LOG_FORMATS
from ..error_handling import handle_file_operation_error, setup_logging
from ..schema import Schema, default_schema, load_schema_file
from ..utils.fs_extra import atomic_write_text, read_text
from ..utils.logging import console, render_actions


@dataclass
class CliState:
    schema_path: Optional[Path] = None
    quiet: bool = False
    log_format: str = "json"
    config: ToolkitConfig = field(default_factory=ToolkitConfig)


def init_state(
    *,
    schema: Optional[Path],
    quiet: bool,
    log_format: Optional[str],
    config_file: Optional[str],
    config_overrides: Optional[List[str]],
    log_file: Optional[Path] = None,
) -> CliState:
    """Load .env, config file and overrides, and configure logging for one invocation."""
    load_dotenv()
    overrides = parse_config_overrides(config_overrides)
    # downstream load_config() calls inherit CLI options
    set_global_config_context(config_file=config_file, overrides=overrides or None)
    config = load_config(config_file=config_file, overrides=overrides)

    fmt = log_format or get_setting(config, "logging", "format", "json")
    if fmt not in LOG_FORMATS:
        raise typer.BadParameter(f"must be one of: {', '.join(LOG_FORMATS)}", param_hint="--log-format")

    setup_logging(logging.WARNING if quiet else logging.INFO, log_file)
    return CliState(schema_path=schema, quiet=quiet, log_format=fmt, config=config)


def get_state(ctx: typer.Context) -> CliState:
    state = ctx.find_root().obj
    return state if isinstance(state, CliState) else CliState()


def resolve_schema(state: CliState, override: Optional[Path] = None) -> Schema:
    path = override or state.schema_path
    return load_schema_file(path) if path else default_schema()


def read_input(path: Path, *, fold_crlf: bool = False) -> str:
    try:
        return read_text(path, fold_crlf=fold_crlf)
    except OSError as e:
        raise OSError(handle_file_operation_error(e, path)) from e


def write_output(path: Optional[Path], text: str) -> None:
    """Write data atomically to `path`, or to stdout when no path is given."""
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    atomic_write_text(path, text)


def emit_actions(state: CliState, actions: Sequence[Dict[str, Any]], log_path: Optional[Path]) -> None:
    """Action logs go to --log in the selected format, else to stderr unless --quiet."""
    rendered = render_actions(actions, state.log_format)
    if log_path is not None:
        atomic_write_text(log_path, rendered)
    elif not state.quiet and actions:
        sys.stderr.write(rendered)


def status(state: CliState, message: str) -> None:
    if not state.quiet:
        console.print(message, highlight=False)
