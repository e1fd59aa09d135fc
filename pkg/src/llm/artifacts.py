"""Run-directory artifacts for corpus annotation runs."""

from __future__ import annotations

import json as _json
from datetime import datetime as _dt, timezone as _tz
from pathlib import Path
from typing import Any, Dict, List, Optional

from ..utils.fs_extra import atomic_write_text


def utc_timestamp() -> str:
    return _dt.now(_tz.utc).isoformat().replace("+00:00", "Z")


class RunArtifacts:
    """Own every file a run writes: RAW responses, .ann outputs, logs, run.json and manifest.jsonl.

    Layout per note NAME:
        NAME.raw.txt        model output, written before any post-processing
        NAME.ann            post-processed standoff
        NAME.log.json       repair / conversion / linking actions
        requests/NAME.*     request body and one response body per attempt
    """

    def __init__(self, run_dir: str | Path, paths: Optional[Dict[str, Any]] = None) -> None:
        paths = paths or {}
        self.run_dir = Path(run_dir)
        self.raw_suffix = paths.get("raw_suffix", ".raw.txt")
        self._manifest_path = self.run_dir / paths.get("manifest_file", "manifest.jsonl")
        self._run_path = self.run_dir / paths.get("run_file", "run.json")
        self._requests_dir = self.run_dir / paths.get("requests_dir", "requests")
        self.status_file = paths.get("status_file", "status.jsonl")
        self.run_dir.mkdir(parents=True, exist_ok=True)

    def raw_path(self, name: str) -> Path:
        return self.run_dir / f"{name}{self.raw_suffix}"

    def ann_path(self, name: str) -> Path:
        return self.run_dir / f"{name}.ann"

    def log_path(self, name: str) -> Path:
        return self.run_dir / f"{name}.log.json"

    @property
    def requests_dir(self) -> Path:
        return self._requests_dir

    @property
    def run_path(self) -> Path:
        return self._run_path

    def has_raw(self, name: str) -> bool:
        return self.raw_path(name).exists()

    def write_raw(self, name: str, text: str) -> Path:
        return atomic_write_text(self.raw_path(name), text)

    def write_ann(self, name: str, ann_text: str) -> Path:
        return atomic_write_text(self.ann_path(name), ann_text)

    def write_log(self, name: str, actions: List[Dict[str, Any]]) -> Path:
        return atomic_write_text(self.log_path(name), _json.dumps(actions, indent=2, ensure_ascii=False) + "\n")

    def write_run_info(self, info: Dict[str, Any]) -> Path:
        return atomic_write_text(self._run_path, _json.dumps(info, indent=2, ensure_ascii=False, sort_keys=True) + "\n")

    def append_manifest(self, record: Dict[str, Any]) -> None:
        """Append one JSON line; callers keep a single writer."""
        self._manifest_path.parent.mkdir(parents=True, exist_ok=True)
        with self._manifest_path.open("a", encoding="utf-8") as f:
            f.write(_json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")

    def read_manifest(self) -> List[Dict[str, Any]]:
        if not self._manifest_path.exists():
            return []
        records = []
        for raw in self._manifest_path.read_text(encoding="utf-8").splitlines():
            if raw.strip():
                records.append(_json.loads(raw))
        return records
