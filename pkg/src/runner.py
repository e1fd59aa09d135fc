from __future__ import annotations

import sys
from pathlib import Path
from typing import List, Optional, Sequence

import click
import typer
from rich.markup import escape

from .cli.annotation_commands import (
    handle_inline2standoff,
    handle_link,
    handle_repair,
    handle_standoff2inline,
    handle_validate,
)
from .cli.harness_commands import handle_annotate, handle_fixtures, handle_prompt
from .cli.score_commands import handle_score
from .cli.shared import get_state, init_state
from .constants import SCHEMA_FORMAT_VERSION, TOOLKIT_VERSION
from .error_handling import ToolkitError
from .utils.logging import console

PROG_NAME = "sdohkit"

app = typer.Typer(add_completion=False, help="SDOH event annotation toolkit: BRAT standoff, inline markup, linking, scoring and one-shot LLM annotation.")


def _version(value: bool) -> None:
    if value:
        typer.echo(f"{PROG_NAME} {TOOLKIT_VERSION} (schema format {SCHEMA_FORMAT_VERSION})")
        raise typer.Exit()


@app.callback()
def global_options(
    ctx: typer.Context,
    schema: Optional[Path] = typer.Option(None, "--schema", help="Schema config JSON (default: built-in SDOH schema)"),
    quiet: bool = typer.Option(False, "--quiet", "-q", help="Only warnings and errors on stderr"),
    log_format: Optional[str] = typer.Option(None, "--log-format", help="Action log format: json, table or csv"),
    config_file: Optional[str] = typer.Option(None, "--config-file", help="Path to custom configuration file"),
    config: Optional[List[str]] = typer.Option(None, "--config", help="Configuration overrides in key=value format (e.g., --config llm.temperature=0.2)"),
    log_file: Optional[Path] = typer.Option(None, "--log-file", help="Also write diagnostics to this file"),
    version: bool = typer.Option(False, "--version", callback=_version, is_eager=True, help="Print toolkit and schema-format versions"),
) -> None:
    ctx.obj = init_state(
        schema=schema, quiet=quiet, log_format=log_format, config_file=config_file, config_overrides=config,
        log_file=log_file,
    )


SchemaOpt = typer.Option(None, "--schema", help="Schema config JSON for this command")
OutOpt = typer.Option(None, "--out", "-o", help="Output file (default: stdout)")
LogOpt = typer.Option(None, "--log", help="Write the action log here instead of stderr")


@app.command()
def validate(
    ctx: typer.Context,
    note: Path = typer.Option(..., "--note", help="Note text (NAME.txt)"),
    ann: Path = typer.Option(..., "--ann", help="Standoff annotation (NAME.ann)"),
    schema: Optional[Path] = SchemaOpt,
) -> None:
    """Report format and schema violations of a note/annotation pair."""
    handle_validate(get_state(ctx), note, ann, schema)


@app.command()
def repair(
    ctx: typer.Context,
    note: Path = typer.Option(..., "--note"),
    ann: Path = typer.Option(..., "--ann", help="Raw model-generated standoff"),
    schema: Optional[Path] = SchemaOpt,
    out: Optional[Path] = OutOpt,
    log: Optional[Path] = LogOpt,
) -> None:
    """Realign offsets and prune dangling references in raw standoff."""
    handle_repair(get_state(ctx), note, ann, schema, out, log)


@app.command()
def inline2standoff(
    ctx: typer.Context,
    note: Path = typer.Option(..., "--note"),
    marked: Path = typer.Option(..., "--marked", help="Note text with <<span>>(Label-subtype) markers"),
    schema: Optional[Path] = SchemaOpt,
    permissive: Optional[bool] = typer.Option(None, "--permissive/--strict", help="Keep unknown labels as textbounds"),
    out: Optional[Path] = OutOpt,
    log: Optional[Path] = LogOpt,
) -> None:
    """Convert inline markup to span-only standoff against the original note."""
    handle_inline2standoff(get_state(ctx), note, marked, schema, permissive, out, log)


@app.command()
def standoff2inline(
    ctx: typer.Context,
    note: Path = typer.Option(..., "--note"),
    ann: Path = typer.Option(..., "--ann"),
    schema: Optional[Path] = SchemaOpt,
    out: Optional[Path] = OutOpt,
) -> None:
    """Render a standoff annotation as inline markup."""
    handle_standoff2inline(get_state(ctx), note, ann, schema, out)


@app.command()
def link(
    ctx: typer.Context,
    note: Path = typer.Option(..., "--note"),
    ann: Path = typer.Option(..., "--ann", help="Span-only standoff; existing E lines are rebuilt"),
    schema: Optional[Path] = SchemaOpt,
    out: Optional[Path] = OutOpt,
    log: Optional[Path] = LogOpt,
) -> None:
    """Attach arguments to their nearest admissible trigger."""
    handle_link(get_state(ctx), note, ann, schema, out, log)


@app.command()
def score(
    ctx: typer.Context,
    gold: Path = typer.Option(..., "--gold", help="Directory of gold NAME.txt/NAME.ann pairs"),
    pred: Path = typer.Option(..., "--pred", help="Directory of predicted NAME.ann files"),
    schema: Optional[Path] = SchemaOpt,
    criteria: Optional[str] = typer.Option(None, "--criteria", help="default, exact, or trigger=...,span=...,labeled=..."),
    matching: Optional[str] = typer.Option(None, "--matching", help="greedy or optimal"),
    fmt: Optional[str] = typer.Option(None, "--format", help="table, csv or json"),
    out: Optional[Path] = OutOpt,
) -> None:
    """Score predicted annotations against gold per event type, role and subtype."""
    handle_score(get_state(ctx), gold, pred, schema, criteria, matching, fmt, out)


@app.command()
def prompt(
    ctx: typer.Context,
    mode: str = typer.Option(..., "--mode", help="standoff or inline"),
    guideline: Path = typer.Option(..., "--guideline"),
    example_note: Path = typer.Option(..., "--example-note"),
    example_ann: Path = typer.Option(..., "--example-ann", help="Example annotation in the chosen mode's format"),
    note: Path = typer.Option(..., "--note"),
    out: Optional[Path] = OutOpt,
) -> None:
    """Print the four one-shot prompt messages as JSON."""
    handle_prompt(get_state(ctx), mode, guideline, example_note, example_ann, note, out)


@app.command()
def annotate(
    ctx: typer.Context,
    notes: Path = typer.Option(..., "--notes", help="Directory of NAME.txt notes"),
    mode: str = typer.Option(..., "--mode", help="standoff or inline"),
    guideline: Path = typer.Option(..., "--guideline"),
    example_note: Path = typer.Option(..., "--example-note"),
    example_ann: Path = typer.Option(..., "--example-ann"),
    schema: Optional[Path] = SchemaOpt,
    endpoint: Optional[str] = typer.Option(None, "--endpoint", help="Chat-completion URL (default: llm.endpoint)"),
    model: Optional[str] = typer.Option(None, "--model"),
    temperature: Optional[float] = typer.Option(None, "--temperature"),
    max_retries: Optional[int] = typer.Option(None, "--max-retries"),
    api_key_env: Optional[str] = typer.Option(None, "--api-key-env", help="Env var holding the bearer token"),
    parallel: Optional[int] = typer.Option(None, "--parallel", help="Concurrent requests (default: runner.parallel)"),
    force: bool = typer.Option(False, "--force", help="Request notes again even when a RAW response exists"),
    permissive: Optional[bool] = typer.Option(None, "--permissive/--strict"),
    out: Path = typer.Option(..., "--out", "-o", help="Run directory"),
) -> None:
    """Annotate a directory of notes with a one-shot prompted model."""
    handle_annotate(
        get_state(ctx),
        notes=notes,
        mode=mode,
        guideline=guideline,
        example_note=example_note,
        example_ann=example_ann,
        schema_path=schema,
        endpoint=endpoint,
        model=model,
        temperature=temperature,
        max_retries=max_retries,
        api_key_env=api_key_env,
        parallel=parallel,
        force=force,
        permissive=permissive,
        out=out,
    )


@app.command()
def fixtures(
    ctx: typer.Context,
    out: Path = typer.Option(..., "--out", "-o", help="Directory to write the fixture corpus into"),
) -> None:
    """Write the bundled example note, gold annotations and before/after fixtures."""
    handle_fixtures(get_state(ctx), out)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and map outcomes to exit codes: 0 ok, 1 operational error, 2 usage error."""
    args = list(sys.argv[1:] if argv is None else argv)
    command = typer.main.get_command(app)
    if not args:
        ctx = click.Context(command, info_name=PROG_NAME)
        typer.echo(command.get_usage(ctx), err=True)
        typer.echo(f"Commands: {', '.join(command.list_commands(ctx))}", err=True)
        typer.echo(f"Try '{PROG_NAME} --help' for help.", err=True)
        return 2
    try:
        rv = command.main(args, prog_name=PROG_NAME, standalone_mode=False)
    except click.UsageError as e:
        e.show()
        return 2
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.Abort:
        console.print("[red]Aborted[/red]")
        return 1
    except (ToolkitError, OSError) as e:
        console.print(f"[red]Error:[/red] {escape(str(e))}", highlight=False, soft_wrap=True)
        return 1
    return rv if isinstance(rv, int) else 0


if __name__ == "__main__":
    sys.exit(main())
