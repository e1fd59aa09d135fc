"""
Tests for prompt assembly, the chat-completion client and corpus runs.
"""

import json

import httpx
import pytest

import src.harness as harness
from src.annotation.standoff import doc_signature, serialize_standoff
from src.config import LlmConfig
from src.error_handling import (
    MalformedResponseError,
    MissingApiKeyError,
    PromptError,
    RetriesExhaustedError,
    ToolkitError,
)
from src.fixtures import AFTER_STANDOFF, BEFORE_STANDOFF, EXAMPLE_NOTE, GOLD_INLINE, GOLD_STANDOFF, GUIDELINE_SAMPLE
from src.harness import annotate_note, postprocess, run_corpus
from src.llm.artifacts import RunArtifacts
from src.llm.client import ChatCompletionClient, complete
from src.llm.messages import Message, OneShotExample, PromptBundle, build_prompt
from src.utils.fs_extra import sha256_text

ENDPOINT = "https://llm.test/v1/chat/completions"
STANDOFF_EXAMPLE = OneShotExample(GUIDELINE_SAMPLE, EXAMPLE_NOTE, GOLD_STANDOFF)
INLINE_EXAMPLE = OneShotExample(GUIDELINE_SAMPLE, EXAMPLE_NOTE, GOLD_INLINE)


def _config(**overrides):
    values = {"endpoint": ENDPOINT, "model": "test-model", "backoff_base": 0.0}
    values.update(overrides)
    return LlmConfig(**values)


def _reply(text):
    return httpx.Response(200, json={"choices": [{"message": {"role": "assistant", "content": text}}]})


def _transport(answer, calls=None):
    """MockTransport answering every request with answer(request_body)."""

    def handler(request):
        body = json.loads(request.content)
        if calls is not None:
            calls.append(body)
        return answer(body)

    return httpx.MockTransport(handler)


def test_build_prompt_roles_and_contents():
    """System, user example, assistant example, user target; texts embedded verbatim."""
    bundle = PromptBundle.for_note("standoff", STANDOFF_EXAMPLE, "Patient smokes daily.\n")
    messages = build_prompt(bundle)
    assert [m.role for m in messages] == ["system", "user", "assistant", "user"]
    assert messages[0].content.endswith(GUIDELINE_SAMPLE)
    assert "BRAT standoff" in messages[0].content
    assert messages[1].content.endswith(EXAMPLE_NOTE)
    assert messages[2].content == GOLD_STANDOFF
    assert messages[3].content.endswith("Patient smokes daily.\n")
    assert messages[1].content.split("\n\n")[0] == messages[3].content.split("\n\n")[0]


def test_build_prompt_is_deterministic():
    """Same bundle, same messages."""
    bundle = PromptBundle.for_note("inline", INLINE_EXAMPLE, EXAMPLE_NOTE)
    assert build_prompt(bundle) == build_prompt(bundle)
    assert "inline markers" in build_prompt(bundle)[1].content


def test_prompt_bundle_checks_example_format():
    """The example annotation has to be in the requested mode's format."""
    with pytest.raises(PromptError):
        PromptBundle.for_note("inline", STANDOFF_EXAMPLE, EXAMPLE_NOTE)
    with pytest.raises(PromptError):
        PromptBundle.for_note("standoff", INLINE_EXAMPLE, EXAMPLE_NOTE)
    with pytest.raises(PromptError):
        PromptBundle.for_note("xml", STANDOFF_EXAMPLE, EXAMPLE_NOTE)


def test_message_rejects_empty_content():
    """Empty messages are not sent."""
    with pytest.raises(PromptError):
        Message("user", "")
    with pytest.raises(PromptError):
        Message("tool", "hi")


def test_complete_posts_chat_request(api_key, tmp_path):
    """The request carries model, messages and temperature with a bearer token; both sides are persisted."""
    seen = []

    def handler(request):
        seen.append(request)
        return _reply("T1\tTobacco 9 20\tTobacco Use\n")

    messages = [Message("user", "annotate this")]
    text = complete(messages, _config(), transport=httpx.MockTransport(handler), persist_dir=tmp_path, name="n1")
    assert text == "T1\tTobacco 9 20\tTobacco Use\n"
    assert seen[0].headers["Authorization"] == "Bearer test-key"
    body = json.loads(seen[0].content)
    assert body == {"model": "test-model", "messages": [{"role": "user", "content": "annotate this"}], "temperature": 0.0}
    assert json.loads((tmp_path / "n1.request.json").read_text()) == body
    assert (tmp_path / "n1.response.1.json").exists()


def test_complete_retries_rate_limits(api_key):
    """Two 429s then success: three attempts, two backoff sleeps."""
    statuses = [429, 429]
    sleeps = []

    def handler(request):
        if statuses:
            return httpx.Response(statuses.pop(0), text="slow down")
        return _reply("done")

    with ChatCompletionClient(_config(), transport=httpx.MockTransport(handler), sleep=sleeps.append) as client:
        assert client.complete([Message("user", "x")]) == "done"
    assert len(sleeps) == 2


def test_complete_gives_up_after_max_retries(api_key):
    """Persistent 503s raise after max_retries + 1 attempts."""
    calls = []
    transport = _transport(lambda body: httpx.Response(503), calls)
    with ChatCompletionClient(_config(max_retries=1), transport=transport, sleep=lambda s: None) as client:
        with pytest.raises(RetriesExhaustedError) as excinfo:
            client.complete([Message("user", "x")])
    assert excinfo.value.attempts == 2
    assert excinfo.value.status == 503
    assert len(calls) == 2


def test_complete_malformed_response(api_key):
    """A body without choices names the missing field."""
    transport = _transport(lambda body: httpx.Response(200, json={"id": "x"}))
    with pytest.raises(MalformedResponseError) as excinfo:
        complete([Message("user", "x")], _config(), transport=transport)
    assert excinfo.value.field == "choices"
    assert "choices" in str(excinfo.value)


def test_complete_requires_api_key(monkeypatch):
    """No key in the environment, no request."""
    monkeypatch.delenv("LLM_API_KEY", raising=False)
    calls = []
    with pytest.raises(MissingApiKeyError, match="LLM_API_KEY"):
        complete([Message("user", "x")], _config(), transport=_transport(lambda body: _reply("x"), calls))
    assert calls == []


def test_postprocess_modes(schema, gold_doc):
    """Standoff responses are repaired; inline responses are converted and linked."""
    standoff = postprocess(BEFORE_STANDOFF, EXAMPLE_NOTE, "standoff", schema)
    assert serialize_standoff(standoff.doc) == AFTER_STANDOFF
    assert all(a["stage"] == "repair" for a in standoff.actions())

    inline = postprocess(GOLD_INLINE, EXAMPLE_NOTE, "inline", schema)
    assert doc_signature(inline.doc) == doc_signature(gold_doc)
    assert inline.link_result.unattached == []


def test_annotate_note_standoff(schema, api_key):
    """The raw standoff response comes back repaired."""
    transport = _transport(lambda body: _reply(BEFORE_STANDOFF))
    result = annotate_note(EXAMPLE_NOTE, "standoff", schema, _config(), STANDOFF_EXAMPLE, transport=transport)
    assert serialize_standoff(result.doc) == AFTER_STANDOFF
    assert result.raw_text == BEFORE_STANDOFF


def test_annotate_note_inline(schema, api_key, gold_doc):
    """An inline response yields the gold events after linking."""
    calls = []
    transport = _transport(lambda body: _reply(GOLD_INLINE), calls)
    result = annotate_note(EXAMPLE_NOTE, "inline", schema, _config(), INLINE_EXAMPLE, transport=transport)
    assert doc_signature(result.doc) == doc_signature(gold_doc)
    assert calls[0]["messages"][2]["content"] == GOLD_INLINE


def test_annotate_note_empty_response(schema, api_key):
    """An empty completion is an empty document, not an error."""
    transport = _transport(lambda body: _reply(""))
    result = annotate_note(EXAMPLE_NOTE, "standoff", schema, _config(), STANDOFF_EXAMPLE, transport=transport)
    assert result.doc.is_empty()


def _notes(tmp_path, names=("a", "b", "c")):
    notes_dir = tmp_path / "notes"
    notes_dir.mkdir()
    for name in names:
        (notes_dir / f"{name}.txt").write_text(EXAMPLE_NOTE if name != "bad" else EXAMPLE_NOTE + "FAIL\n")
    return notes_dir


def _run(notes_dir, run_dir, schema, transport, **kwargs):
    return run_corpus(
        notes_dir, "standoff", schema, _config(), STANDOFF_EXAMPLE, run_dir,
        transport=transport, show_progress=False, **kwargs,
    )


def test_run_corpus_writes_artifacts(tmp_path, schema, api_key):
    """Every note gets RAW, .ann, log and a success record with the note hash."""
    calls = []
    notes_dir = _notes(tmp_path)
    run_dir = _run(notes_dir, tmp_path / "run", schema, _transport(lambda body: _reply(BEFORE_STANDOFF), calls))

    assert len(calls) == 3
    for name in ("a", "b", "c"):
        assert (run_dir / f"{name}.raw.txt").read_text() == BEFORE_STANDOFF
        assert (run_dir / f"{name}.ann").read_text() == AFTER_STANDOFF
        actions = json.loads((run_dir / f"{name}.log.json").read_text())
        assert (actions[0]["stage"], actions[0]["action"], actions[0]["line_no"]) == ("repair", "dropped_line", 1)
        assert (run_dir / "requests" / f"{name}.request.json").exists()

    records = [json.loads(line) for line in (run_dir / "manifest.jsonl").read_text().splitlines()]
    assert sorted(r["note"] for r in records) == ["a", "b", "c"]
    assert all(r["status"] == "success" for r in records)
    assert all(r["note_sha256"] == sha256_text(EXAMPLE_NOTE) == r["note_sha256_after"] for r in records)

    info = json.loads((run_dir / "run.json").read_text())
    assert info["counts"] == {"success": 3, "failed": 0, "skipped": 0}
    assert info["llm"]["model"] == "test-model"
    assert "test-key" not in (run_dir / "run.json").read_text()


def test_run_corpus_resumes(tmp_path, schema, api_key):
    """A second run sends no requests; a RAW without its .ann is post-processed from disk."""
    notes_dir = _notes(tmp_path)
    run_dir = _run(notes_dir, tmp_path / "run", schema, _transport(lambda body: _reply(BEFORE_STANDOFF)))
    (run_dir / "a.ann").unlink()

    calls = []
    _run(notes_dir, run_dir, schema, _transport(lambda body: _reply("unused"), calls))
    assert calls == []
    assert (run_dir / "a.ann").read_text() == AFTER_STANDOFF
    records = [json.loads(line) for line in (run_dir / "manifest.jsonl").read_text().splitlines()][3:]
    assert sorted((r["note"], r["status"]) for r in records) == [("a", "success"), ("b", "skipped"), ("c", "skipped")]
    assert json.loads((run_dir / "run.json").read_text())["counts"] == {"success": 1, "failed": 0, "skipped": 2}


def test_run_corpus_force_requests_again(tmp_path, schema, api_key):
    """force re-requests notes that already have a RAW response."""
    notes_dir = _notes(tmp_path, names=("a",))
    run_dir = _run(notes_dir, tmp_path / "run", schema, _transport(lambda body: _reply(BEFORE_STANDOFF)))
    calls = []
    _run(notes_dir, run_dir, schema, _transport(lambda body: _reply(GOLD_STANDOFF), calls), force=True)
    assert len(calls) == 1
    assert (run_dir / "a.raw.txt").read_text() == GOLD_STANDOFF


def test_run_corpus_isolates_failures(tmp_path, schema, api_key):
    """One malformed response fails its note and the run carries on."""
    notes_dir = _notes(tmp_path, names=("a", "bad", "c"))

    def answer(body):
        if "FAIL" in body["messages"][-1]["content"]:
            return httpx.Response(200, json={"unexpected": True})
        return _reply(BEFORE_STANDOFF)

    run_dir = _run(notes_dir, tmp_path / "run", schema, _transport(answer), parallel=2)
    records = {r["note"]: r for r in RunArtifacts(run_dir).read_manifest()}
    assert records["bad"]["status"] == "failed"
    assert "choices" in records["bad"]["error"]
    assert not (run_dir / "bad.ann").exists()
    assert records["a"]["status"] == records["c"]["status"] == "success"


def test_run_corpus_records_undecodable_note(tmp_path, schema):
    """A note that is not UTF-8 is a failed record; the other notes and run.json still finish."""
    notes_dir = _notes(tmp_path, names=("a",))
    (notes_dir / "b.txt").write_bytes(b"Tobacco: \xff\n")
    run_dir = tmp_path / "run"
    run_dir.mkdir()
    for name in ("a", "b"):
        (run_dir / f"{name}.raw.txt").write_text(BEFORE_STANDOFF)

    _run(notes_dir, run_dir, schema, _transport(lambda body: _reply("unused")))
    records = {r["note"]: r for r in RunArtifacts(run_dir).read_manifest()}
    assert records["a"]["status"] == "success"
    assert records["b"]["status"] == "failed"
    assert "b.txt" in records["b"]["error"] and "UTF-8" in records["b"]["error"]
    info = json.loads((run_dir / "run.json").read_text())
    assert info["counts"] == {"success": 1, "failed": 1, "skipped": 0}
    assert "finished_at" in info


def test_raw_is_written_before_postprocessing(tmp_path, schema, api_key, monkeypatch):
    """A post-processing crash still leaves the RAW response on disk."""

    def explode(*args, **kwargs):
        raise ToolkitError("post-processing failed")

    monkeypatch.setattr(harness, "postprocess", explode)
    notes_dir = _notes(tmp_path, names=("a",))
    run_dir = _run(notes_dir, tmp_path / "run", schema, _transport(lambda body: _reply(BEFORE_STANDOFF)))
    assert (run_dir / "a.raw.txt").read_text() == BEFORE_STANDOFF
    record = json.loads((run_dir / "manifest.jsonl").read_text())
    assert record["status"] == "failed"


def test_run_corpus_needs_key_only_for_requests(tmp_path, schema, monkeypatch):
    """A missing key fails the run up front when notes still need requests."""
    monkeypatch.delenv("LLM_API_KEY", raising=False)
    notes_dir = _notes(tmp_path, names=("a",))
    with pytest.raises(MissingApiKeyError):
        _run(notes_dir, tmp_path / "run", schema, _transport(lambda body: _reply("x")))
