"""Message assembly for the one-shot annotation prompt."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, List, Optional

from ..config_loader import load_prompt
from ..constants import MODES
from ..error_handling import PromptError, format_error_message

ROLES = ("system", "user", "assistant")


@dataclass(frozen=True)
class Message:
    role: str
    content: str

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise PromptError(f"message role must be one of {', '.join(ROLES)}, got {self.role!r}")
        if not self.content:
            raise PromptError(f"{self.role} message content is empty")

    def as_dict(self) -> Dict[str, str]:
        return asdict(self)


@dataclass(frozen=True)
class OneShotExample:
    guideline_text: str
    example_note: str
    example_annotation: str


@dataclass(frozen=True)
class PromptBundle:
    mode: str
    guideline_text: str
    example_note: str
    example_annotation: str
    target_note: str

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise PromptError(format_error_message("INVALID_MODE", modes=", ".join(MODES)))
        if self.mode == "inline" and self.example_annotation.strip() and "<<" not in self.example_annotation:
            raise PromptError("inline example annotation carries no <<...>>(...) markers")
        if self.mode == "standoff" and "<<" in self.example_annotation and ">>(" in self.example_annotation:
            raise PromptError("standoff example annotation contains inline markers")

    @staticmethod
    def for_note(mode: str, example: OneShotExample, target_note: str) -> "PromptBundle":
        return PromptBundle(mode, example.guideline_text, example.example_note, example.example_annotation, target_note)


def _join(head: str, body: str) -> str:
    return f"{head}\n\n{body}" if body else head


def build_prompt(bundle: PromptBundle, prompts_root: Optional[Path] = None) -> List[Message]:
    """Four messages: system role + guideline, user example, assistant example annotation, user target."""
    system = load_prompt(f"{bundle.mode}_system", prompts_root)
    instruction = load_prompt(f"{bundle.mode}_instruction", prompts_root)
    return [
        Message("system", _join(system, bundle.guideline_text)),
        Message("user", _join(instruction, bundle.example_note)),
        Message("assistant", bundle.example_annotation),
        Message("user", _join(instruction, bundle.target_note)),
    ]
