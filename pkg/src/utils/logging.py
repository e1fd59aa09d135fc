from __future__ import annotations

import csv
import io
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from rich.console import Console
from rich.panel import Panel
from rich.progress import BarColumn, MofNCompleteColumn, Progress, SpinnerColumn, TextColumn
from rich.table import Table

from ..constants import LOG_FORMATS
from ..error_handling import ToolkitError, format_error_message

# Data goes to stdout or files; everything on this console is diagnostics
console = Console(stderr=True)


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")


class LiveStatus:
    """Transient progress line for corpus runs, mirrored to status.jsonl in the run dir."""

    def __init__(self, total: int, run_dir: Optional[Path] = None, status_file: str = "status.jsonl") -> None:
        self.progress = Progress(
            SpinnerColumn(),
            TextColumn("[bold blue]{task.fields[phase]}: {task.description}"),
            BarColumn(),
            MofNCompleteColumn(),
            console=console,
            expand=True,
            transient=True,
        )
        self.total = total
        self.task_id = None
        self.run_dir = run_dir
        self.status_file = status_file

    def __enter__(self) -> "LiveStatus":
        self.progress.start()
        self.task_id = self.progress.add_task("starting", total=self.total, phase="annotate")
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        try:
            if self.task_id is not None:
                self.progress.remove_task(self.task_id)
        finally:
            self.progress.stop()

    def update(self, message: str, advance: int = 0) -> None:
        if self.task_id is not None:
            # "[phase] detail"; default phase=run
            phase = "run"
            detail = message
            if message.startswith("[") and "]" in message:
                phase = message[1 : message.index("]")]
                detail = message[message.index("]") + 1 :].strip()
            if len(detail) > 160:
                detail = detail[:157] + "..."
            self.progress.update(self.task_id, description=detail, phase=phase, advance=advance)
        else:
            console.log(message)

        if self.run_dir:
            write_status_line(self.run_dir, message, self.status_file, echo=False)


def log_panel(title: str, body: str) -> None:
    console.print(Panel.fit(body, title=title))


def write_status_line(run_dir: Path, message: str, status_file: str = "status.jsonl", echo: bool = True) -> None:
    try:
        log_path = run_dir / status_file
        log_path.parent.mkdir(parents=True, exist_ok=True)
        with log_path.open("a", encoding="utf-8") as f:
            f.write(json.dumps({"ts": _utc_now(), "message": message}, ensure_ascii=False) + "\n")
        if echo:
            console.log(message)
    except OSError:
        pass


def _columns(actions: Sequence[Dict[str, Any]]) -> List[str]:
    columns: List[str] = []
    for action in actions:
        for key in action:
            if key not in columns:
                columns.append(key)
    return columns


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (list, dict)):
        return json.dumps(value, ensure_ascii=False)
    return str(value)


def render_actions(actions: Sequence[Dict[str, Any]], fmt: str = "json") -> str:
    """Render an action log (repair, conversion, linking) as json, table or csv text."""
    if fmt == "json":
        return json.dumps(list(actions), indent=2, ensure_ascii=False) + "\n"

    columns = _columns(actions)
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for action in actions:
            writer.writerow([_cell(action.get(c)) for c in columns])
        return buffer.getvalue()

    if fmt == "table":
        table = Table(box=None, show_edge=False, pad_edge=False)
        for column in columns:
            table.add_column(column)
        for action in actions:
            table.add_row(*[_cell(action.get(c)) for c in columns])
        buffer = io.StringIO()
        Console(file=buffer, width=200, color_system=None).print(table)
        return buffer.getvalue()

    raise ToolkitError(
        format_error_message("UNKNOWN_FORMAT", fmt=fmt, choices=", ".join(LOG_FORMATS)), {"format": fmt}
    )
