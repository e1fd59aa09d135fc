"""Evaluation counts, micro aggregation, and report rendering."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Tuple

from rich.console import Console
from rich.table import Table

from ..constants import REPORT_FORMATS
from ..error_handling import ScoringError, format_error_message

TRIGGER = "trigger"
ARGUMENT = "argument"
SUBTYPE = "subtype"
MICRO_ROWS = ("micro-trigger", "micro-argument", "micro-overall")


@dataclass(frozen=True)
class Counts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __add__(self, other: "Counts") -> "Counts":
        return Counts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def as_dict(self) -> Dict[str, Any]:
        return {
            "tp": self.tp, "fp": self.fp, "fn": self.fn,
            "precision": round(self.precision, 4), "recall": round(self.recall, 4), "f1": round(self.f1, 4),
        }


def trigger_key(event_type: str) -> str:
    return f"{TRIGGER}:{event_type}"


def argument_key(event_type: str, role: str) -> str:
    return f"{ARGUMENT}:{event_type}:{role}"


def subtype_key(role: str, value: str) -> str:
    return f"{SUBTYPE}:{role}:{value}"


@dataclass
class EvalReport:
    """Counts per category key (`trigger:E`, `argument:E:Role`, `subtype:Role:value`)."""

    counts: Dict[str, Counts] = field(default_factory=dict)

    def add(self, key: str, tp: int = 0, fp: int = 0, fn: int = 0) -> None:
        self.counts[key] = self.counts.get(key, Counts()) + Counts(tp, fp, fn)

    def _sum(self, prefix: str) -> Counts:
        total = Counts()
        for key, c in self.counts.items():
            if key.startswith(prefix + ":"):
                total = total + c
        return total

    def micro(self) -> Dict[str, Counts]:
        trig = self._sum(TRIGGER)
        arg = self._sum(ARGUMENT)
        return {"micro-trigger": trig, "micro-argument": arg, "micro-overall": trig + arg}

    def rows(self) -> List[Tuple[str, Counts]]:
        order = {TRIGGER: 0, ARGUMENT: 1, SUBTYPE: 2}
        keys = sorted(self.counts, key=lambda k: (order.get(k.split(":", 1)[0], 3), k))
        return [(k, self.counts[k]) for k in keys] + list(self.micro().items())

    def populated(self) -> List[Tuple[str, Counts]]:
        return [(k, c) for k, c in self.rows() if c.tp or c.fp or c.fn]


def aggregate(reports: Iterable[EvalReport]) -> EvalReport:
    """Micro aggregation: sum counts per category; metrics derive from the sums."""
    total = EvalReport()
    for report in reports:
        for key, c in report.counts.items():
            total.add(key, c.tp, c.fp, c.fn)
    return total


def _nested(report: EvalReport) -> Dict[str, Any]:
    events: Dict[str, Any] = {}
    subtypes: Dict[str, Any] = {}
    for key, c in report.counts.items():
        kind, _, rest = key.partition(":")
        if kind == TRIGGER:
            events.setdefault(rest, {"trigger": None, "arguments": {}})["trigger"] = c.as_dict()
        elif kind == ARGUMENT:
            event_type, _, role = rest.partition(":")
            events.setdefault(event_type, {"trigger": None, "arguments": {}})["arguments"][role] = c.as_dict()
        elif kind == SUBTYPE:
            role, _, value = rest.partition(":")
            subtypes.setdefault(role, {})[value] = c.as_dict()
    micro = {k.split("-", 1)[1]: c.as_dict() for k, c in report.micro().items()}
    return {"events": events, "subtypes": subtypes, "micro": micro}


def emit_report(report: EvalReport, fmt: str = "table") -> str:
    if fmt == "json":
        return json.dumps(_nested(report), indent=2, sort_keys=True) + "\n"

    header = ["category", "TP", "FP", "FN", "P", "R", "F1"]
    rows = [
        [key, str(c.tp), str(c.fp), str(c.fn), f"{c.precision:.4f}", f"{c.recall:.4f}", f"{c.f1:.4f}"]
        for key, c in report.rows()
    ]
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buffer.getvalue()
    if fmt == "table":
        table = Table(box=None, show_edge=False, pad_edge=False)
        for i, name in enumerate(header):
            table.add_column(name, justify="left" if i == 0 else "right", no_wrap=True)
        for row in rows:
            table.add_row(*row)
        buffer = io.StringIO()
        Console(file=buffer, width=200, color_system=None).print(table)
        return buffer.getvalue()

    raise ScoringError(
        format_error_message("UNKNOWN_FORMAT", fmt=fmt, choices=", ".join(REPORT_FORMATS)), {"format": fmt}
    )
