"""Command handler for corpus scoring."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import typer

from ..config_loader import get_setting
from ..constants import REPORT_FORMATS
from ..error_handling import format_error_message
from ..scoring.report import emit_report
from ..scoring.scorer import MATCHING_MODES, parse_criteria, score_corpus
from .shared import CliState, resolve_schema, status, write_output


def handle_score(
    state: CliState,
    gold: Path,
    pred: Path,
    schema_path: Optional[Path],
    criteria: Optional[str],
    matching: Optional[str],
    fmt: Optional[str],
    out: Optional[Path],
) -> None:
    schema = resolve_schema(state, schema_path)
    criteria = criteria or get_setting(state.config, "scoring", "criteria", "default")
    matching = matching or get_setting(state.config, "scoring", "matching", "greedy")
    fmt = fmt or get_setting(state.config, "scoring", "format", "table")
    if fmt not in REPORT_FORMATS:
        raise typer.BadParameter(f"must be one of: {', '.join(REPORT_FORMATS)}", param_hint="--format")
    if matching not in MATCHING_MODES:
        raise typer.BadParameter(f"must be one of: {', '.join(MATCHING_MODES)}", param_hint="--matching")
    for directory in (gold, pred):
        if not directory.is_dir():
            raise NotADirectoryError(format_error_message("FILE_NOT_FOUND", path=directory))

    report, missing = score_corpus(gold, pred, schema, parse_criteria(criteria), matching)
    write_output(out, emit_report(report, fmt))
    if missing:
        status(state, f"[yellow]{len(missing)} note(s) without predictions scored as empty: {', '.join(missing)}[/yellow]")
