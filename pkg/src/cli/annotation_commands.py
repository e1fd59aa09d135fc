"""Command handlers for the per-document annotation stages."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import typer

from ..annotation.inline import inline_to_standoff, standoff_to_inline
from ..annotation.linker import link_doc
from ..annotation.repair import repair_standoff
from ..annotation.standoff import parse_standoff, serialize_standoff, validate_doc
from ..config_loader import get_setting
from ..utils.logging import log_panel
from .shared import CliState, emit_actions, read_input, resolve_schema, status, write_output


def handle_validate(state: CliState, note: Path, ann: Path, schema_path: Optional[Path]) -> None:
    """Print every violation; exit 1 when there is at least one."""
    schema = resolve_schema(state, schema_path)
    note_text = read_input(note)
    doc, diagnostics = parse_standoff(read_input(ann, fold_crlf=True), note_text, strict=False)
    problems = [str(d) for d in diagnostics if d.kind != "violation"]
    problems += [str(v) for v in validate_doc(doc, schema)]
    for line in problems:
        typer.echo(line)
    typer.echo(f"{len(problems)} violation{'s' if len(problems) != 1 else ''}")
    if problems:
        raise typer.Exit(code=1)


def handle_repair(
    state: CliState, note: Path, ann: Path, schema_path: Optional[Path], out: Optional[Path], log: Optional[Path]
) -> None:
    schema = resolve_schema(state, schema_path)
    doc, repair_log = repair_standoff(read_input(ann, fold_crlf=True), read_input(note), schema)
    write_output(out, serialize_standoff(doc))
    emit_actions(state, repair_log.actions, log)
    if not state.quiet:
        summary = repair_log.summary()
        log_panel("Repair", "\n".join(f"{k}: {v}" for k, v in summary.items()))


def handle_inline2standoff(
    state: CliState,
    note: Path,
    marked: Path,
    schema_path: Optional[Path],
    permissive: Optional[bool],
    out: Optional[Path],
    log: Optional[Path],
) -> None:
    schema = resolve_schema(state, schema_path)
    if permissive is None:
        permissive = bool(get_setting(state.config, "inline", "permissive", False))
    doc, conversion_log = inline_to_standoff(read_input(marked), read_input(note), schema, permissive=permissive)
    write_output(out, serialize_standoff(doc))
    emit_actions(state, conversion_log.actions, log)
    status(state, f"{len(doc.textbounds)} textbound(s), {len(doc.attributes)} attribute(s)")


def handle_standoff2inline(
    state: CliState, note: Path, ann: Path, schema_path: Optional[Path], out: Optional[Path]
) -> None:
    schema = resolve_schema(state, schema_path)
    doc, _ = parse_standoff(read_input(ann, fold_crlf=True), read_input(note), strict=True)
    write_output(out, standoff_to_inline(doc, schema))


def handle_link(
    state: CliState, note: Path, ann: Path, schema_path: Optional[Path], out: Optional[Path], log: Optional[Path]
) -> None:
    schema = resolve_schema(state, schema_path)
    # stale E lines are rebuilt, so only the spans need to be sound
    doc, _ = parse_standoff(read_input(ann, fold_crlf=True), read_input(note), strict=False)
    linked, result = link_doc(doc, schema)
    write_output(out, serialize_standoff(linked))
    emit_actions(state, result.actions(), log)
    status(state, f"{len(result.events)} event(s), {len(result.unattached)} unattached argument(s)")
