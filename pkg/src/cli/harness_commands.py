"""Command handlers for prompt assembly, corpus annotation and fixture generation."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

import typer

from ..config import LlmConfig
from ..config_loader import get_setting
from ..constants import MODES
from ..fixtures import write_fixtures
from ..harness import run_corpus
from ..llm.artifacts import RunArtifacts
from ..llm.messages import OneShotExample, PromptBundle, build_prompt
from ..utils.logging import log_panel
from .shared import CliState, read_input, resolve_schema, status, write_output


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise typer.BadParameter(f"must be one of: {', '.join(MODES)}", param_hint="--mode")


def _example(guideline: Path, example_note: Path, example_ann: Path) -> OneShotExample:
    return OneShotExample(read_input(guideline), read_input(example_note), read_input(example_ann))


def handle_prompt(
    state: CliState,
    mode: str,
    guideline: Path,
    example_note: Path,
    example_ann: Path,
    note: Path,
    out: Optional[Path],
) -> None:
    """Write the four prompt messages as a JSON list."""
    _check_mode(mode)
    bundle = PromptBundle.for_note(mode, _example(guideline, example_note, example_ann), read_input(note))
    messages = [m.as_dict() for m in build_prompt(bundle)]
    write_output(out, json.dumps(messages, indent=2, ensure_ascii=False) + "\n")


def handle_annotate(
    state: CliState,
    *,
    notes: Path,
    mode: str,
    guideline: Path,
    example_note: Path,
    example_ann: Path,
    schema_path: Optional[Path],
    endpoint: Optional[str],
    model: Optional[str],
    temperature: Optional[float],
    max_retries: Optional[int],
    api_key_env: Optional[str],
    parallel: Optional[int],
    force: bool,
    permissive: Optional[bool],
    out: Path,
) -> None:
    _check_mode(mode)
    schema = resolve_schema(state, schema_path)
    llm = LlmConfig.from_config(
        state.config,
        endpoint=endpoint,
        model=model,
        temperature=temperature,
        max_retries=max_retries,
        api_key_env=api_key_env,
    )
    if parallel is None:
        parallel = int(get_setting(state.config, "runner", "parallel", 1))
    if permissive is None:
        permissive = bool(get_setting(state.config, "inline", "permissive", False))

    run_dir = run_corpus(
        notes,
        mode,
        schema,
        llm,
        _example(guideline, example_note, example_ann),
        out,
        parallel=parallel,
        force=force,
        permissive=permissive,
        paths=state.config.paths,
        show_progress=not state.quiet,
    )
    if not state.quiet:
        info = json.loads(RunArtifacts(run_dir, state.config.paths).run_path.read_text(encoding="utf-8"))
        counts = info.get("counts", {})
        log_panel("Annotate", "\n".join(f"{k}: {v}" for k, v in counts.items()) + f"\nrun dir: {run_dir}")


def handle_fixtures(state: CliState, out: Path) -> None:
    written = write_fixtures(out)
    status(state, f"wrote {len(written)} fixture file(s) to {out}")
