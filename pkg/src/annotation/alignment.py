"""Character-level alignment of marker-stripped model output against the original note."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from rapidfuzz.distance import Levenshtein

INSERTED = "inserted"       # in the model output, absent from the note
OMITTED = "omitted"         # in the note, absent from the model output
SUBSTITUTED = "substituted"


@dataclass(frozen=True)
class EditRun:
    kind: str
    stripped_start: int
    stripped_end: int
    note_start: int
    note_end: int
    text: str

    @property
    def length(self) -> int:
        return max(self.stripped_end - self.stripped_start, self.note_end - self.note_start)


@dataclass
class Alignment:
    mapping: List[Optional[int]] = field(default_factory=list)
    script: List[EditRun] = field(default_factory=list)

    @property
    def cost(self) -> int:
        return sum(run.length for run in self.script)

    def is_identity(self) -> bool:
        return not self.script

    def note_span(self, start: int, end: int) -> Optional[Tuple[int, int]]:
        """Contract a stripped-text span to its first and last aligned characters."""
        aligned = [p for p in self.mapping[start:end] if p is not None]
        if not aligned:
            return None
        return (aligned[0], aligned[-1] + 1)


def align_to_note(stripped_text: str, note_text: str) -> Alignment:
    """Minimum-edit-distance global alignment (unit costs) of stripped text onto the note."""
    alignment = Alignment(mapping=[None] * len(stripped_text))
    for op in Levenshtein.opcodes(stripped_text, note_text):
        src_len = op.src_end - op.src_start
        dest_len = op.dest_end - op.dest_start
        if op.tag == "equal":
            for k in range(src_len):
                alignment.mapping[op.src_start + k] = op.dest_start + k
            continue
        if op.tag == "delete":
            alignment.script.append(
                EditRun(INSERTED, op.src_start, op.src_end, op.dest_start, op.dest_start,
                        stripped_text[op.src_start:op.src_end])
            )
            continue
        if op.tag == "insert":
            alignment.script.append(
                EditRun(OMITTED, op.src_start, op.src_start, op.dest_start, op.dest_end,
                        note_text[op.dest_start:op.dest_end])
            )
            continue
        # replace: pair characters 1:1, any remainder is an insertion or omission
        paired = min(src_len, dest_len)
        for k in range(paired):
            alignment.mapping[op.src_start + k] = op.dest_start + k
        alignment.script.append(
            EditRun(SUBSTITUTED, op.src_start, op.src_start + paired, op.dest_start, op.dest_start + paired,
                    stripped_text[op.src_start:op.src_start + paired])
        )
        if src_len > paired:
            alignment.script.append(
                EditRun(INSERTED, op.src_start + paired, op.src_end, op.dest_end, op.dest_end,
                        stripped_text[op.src_start + paired:op.src_end])
            )
        elif dest_len > paired:
            alignment.script.append(
                EditRun(OMITTED, op.src_end, op.src_end, op.dest_start + paired, op.dest_end,
                        note_text[op.dest_start + paired:op.dest_end])
            )
    return alignment
