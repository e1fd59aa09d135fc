"""One-shot annotation harness: prompt, call, persist, post-process; per note and per corpus."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from contextlib import nullcontext
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional

import httpx

from .annotation.inline import ConversionLog, inline_to_standoff
from .annotation.linker import LinkResult, link_doc
from .annotation.repair import RepairLog, repair_standoff
from .annotation.standoff import AnnotationDoc, serialize_standoff
from .config import LlmConfig
from .constants import MODES, NOTE_SUFFIX, TOOLKIT_VERSION
from .error_handling import ConfigurationError, ToolkitError, format_error_message
from .llm.artifacts import RunArtifacts, utc_timestamp
from .llm.client import ChatCompletionClient
from .llm.messages import OneShotExample, PromptBundle, build_prompt
from .schema import Schema
from .utils.fs_extra import read_text, sha256_text
from .utils.logging import LiveStatus

logger = logging.getLogger("sdohkit.harness")


@dataclass
class AnnotationResult:
    doc: AnnotationDoc
    raw_text: str
    mode: str
    repair_log: Optional[RepairLog] = None
    conversion_log: Optional[ConversionLog] = None
    link_result: Optional[LinkResult] = None

    def actions(self) -> List[Dict[str, Any]]:
        """Every post-processing action, tagged with the stage that produced it."""
        out: List[Dict[str, Any]] = []
        if self.repair_log is not None:
            out += [{"stage": "repair", **a} for a in self.repair_log.actions]
        if self.conversion_log is not None:
            out += [{"stage": "inline", **a} for a in self.conversion_log.actions]
        if self.link_result is not None:
            out += [{"stage": "link", **a} for a in self.link_result.actions()]
        return out


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ConfigurationError(format_error_message("INVALID_MODE", modes=", ".join(MODES)))


def postprocess(
    response_text: str, note_text: str, mode: str, schema: Schema, permissive: bool = False
) -> AnnotationResult:
    """Standoff: repair. Inline: convert, then link. Total on any response text."""
    _check_mode(mode)
    if mode == "standoff":
        doc, repair_log = repair_standoff(response_text, note_text, schema)
        return AnnotationResult(doc, response_text, mode, repair_log=repair_log)
    spans, conversion_log = inline_to_standoff(response_text, note_text, schema, permissive=permissive)
    doc, link_result = link_doc(spans, schema)
    return AnnotationResult(doc, response_text, mode, conversion_log=conversion_log, link_result=link_result)


def annotate_note(
    note_text: str,
    mode: str,
    schema: Schema,
    config: LlmConfig,
    example: OneShotExample,
    *,
    client: Optional[ChatCompletionClient] = None,
    transport: Optional[httpx.BaseTransport] = None,
    artifacts: Optional[RunArtifacts] = None,
    name: str = "note",
    permissive: bool = False,
) -> AnnotationResult:
    """Prompt the endpoint for one note; the RAW response is on disk before post-processing starts."""
    _check_mode(mode)
    messages = build_prompt(PromptBundle.for_note(mode, example, note_text))
    persist_dir = artifacts.requests_dir if artifacts is not None else None
    if client is None:
        with ChatCompletionClient(config, transport=transport) as own:
            response = own.complete(messages, persist_dir=persist_dir, name=name)
    else:
        response = client.complete(messages, persist_dir=persist_dir, name=name)
    if artifacts is not None:
        artifacts.write_raw(name, response)
    return postprocess(response, note_text, mode, schema, permissive=permissive)


def list_notes(notes_dir: Path, raw_suffix: str = ".raw.txt") -> List[Path]:
    return sorted(p for p in notes_dir.glob(f"*{NOTE_SUFFIX}") if not p.name.endswith(raw_suffix))


def _finish(
    artifacts: RunArtifacts, name: str, note_path: Path, note_sha: str, result: AnnotationResult
) -> Dict[str, Any]:
    artifacts.write_ann(name, serialize_standoff(result.doc))
    artifacts.write_log(name, result.actions())
    after = sha256_text(read_text(note_path))
    if after != note_sha:
        logger.error("%s changed on disk during the run", note_path)
    return {
        "note_sha256": note_sha,
        "note_sha256_after": after,
        "raw": artifacts.raw_path(name).name,
        "ann": artifacts.ann_path(name).name,
        "log": artifacts.log_path(name).name,
        "spans": len(result.doc.textbounds),
        "events": len(result.doc.events),
    }


def run_corpus(
    notes_dir: str | Path,
    mode: str,
    schema: Schema,
    config: LlmConfig,
    example: OneShotExample,
    run_dir: str | Path,
    *,
    parallel: int = 1,
    force: bool = False,
    permissive: bool = False,
    transport: Optional[httpx.BaseTransport] = None,
    paths: Optional[Dict[str, Any]] = None,
    show_progress: bool = True,
) -> Path:
    """Annotate every NAME.txt in notes_dir into run_dir.

    Notes whose RAW response already exists are not requested again unless
    `force`; a RAW without its .ann is post-processed from disk. Per-note
    failures are recorded in the manifest and the run continues.
    """
    _check_mode(mode)
    if parallel < 1:
        raise ConfigurationError(f"parallel must be >= 1, got {parallel}")
    notes_dir = Path(notes_dir)
    artifacts = RunArtifacts(run_dir, paths)
    notes = list_notes(notes_dir, artifacts.raw_suffix)

    run_info: Dict[str, Any] = {
        "toolkit_version": TOOLKIT_VERSION,
        "mode": mode,
        "llm": config.to_manifest(),
        "parallel": parallel,
        "force": force,
        "permissive": permissive,
        "notes_dir": str(notes_dir),
        "notes": len(notes),
        "guideline_sha256": sha256_text(example.guideline_text),
        "example_note_sha256": sha256_text(example.example_note),
        "example_annotation_sha256": sha256_text(example.example_annotation),
        "started_at": utc_timestamp(),
    }
    artifacts.write_run_info(run_info)

    pending: List[Path] = []
    replay: List[Path] = []
    for note_path in notes:
        name = note_path.stem
        if force or not artifacts.has_raw(name):
            pending.append(note_path)
        elif not artifacts.ann_path(name).exists():
            replay.append(note_path)
        else:
            now = utc_timestamp()
            artifacts.append_manifest(
                {"note": name, "status": "skipped", "started_at": now, "finished_at": now, "error": None}
            )
    if pending:
        config.api_key()

    def process(note_path: Path, from_raw: bool, client: Optional[ChatCompletionClient]) -> Dict[str, Any]:
        name = note_path.stem
        record: Dict[str, Any] = {"note": name, "started_at": utc_timestamp(), "error": None, "from_raw": from_raw}
        try:
            note_text = read_text(note_path)
            note_sha = sha256_text(note_text)
            if from_raw:
                result = postprocess(read_text(artifacts.raw_path(name)), note_text, mode, schema, permissive)
            else:
                result = annotate_note(
                    note_text, mode, schema, config, example,
                    client=client, artifacts=artifacts, name=name, permissive=permissive,
                )
            record.update(_finish(artifacts, name, note_path, note_sha, result))
            record["status"] = "success"
        except (ToolkitError, OSError) as e:
            logger.error("%s failed: %s", name, e)
            record.update(status="failed", error=str(e))
        record["finished_at"] = utc_timestamp()
        return record

    counts = {"success": 0, "failed": 0, "skipped": len(notes) - len(pending) - len(replay)}
    with ChatCompletionClient(config, transport=transport) as client:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            futures = [pool.submit(process, p, True, None) for p in replay]
            futures += [pool.submit(process, p, False, client) for p in pending]
            progress = LiveStatus(len(futures), artifacts.run_dir, artifacts.status_file) if show_progress else nullcontext()
            with progress as status:
                for future in as_completed(futures):
                    record = future.result()
                    # main thread is the only manifest writer
                    artifacts.append_manifest(record)
                    counts[record["status"]] += 1
                    if status is not None:
                        status.update(f"[{mode}] {record['note']}: {record['status']}", advance=1)

    run_info.update(finished_at=utc_timestamp(), counts=counts)
    artifacts.write_run_info(run_info)
    logger.info("run finished: %s", counts)
    return artifacts.run_dir
