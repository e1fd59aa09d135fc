"""Shared fixtures: the default schema and the bundled example documents."""

import pytest

from src.annotation.standoff import parse_standoff
from src.fixtures import EXAMPLE_NOTE, GOLD_STANDOFF, write_fixtures
from src.schema import default_schema


@pytest.fixture
def schema():
    return default_schema()


@pytest.fixture
def note():
    return EXAMPLE_NOTE


@pytest.fixture
def gold_doc():
    doc, diagnostics = parse_standoff(GOLD_STANDOFF, EXAMPLE_NOTE, strict=True)
    assert diagnostics == []
    return doc


@pytest.fixture
def fixture_dir(tmp_path):
    out = tmp_path / "fixtures"
    write_fixtures(out)
    return out


@pytest.fixture
def api_key(monkeypatch):
    monkeypatch.setenv("LLM_API_KEY", "test-key")
    return "test-key"
