"""Chat-completion client, one-shot prompt assembly and run artifacts."""

from .artifacts import RunArtifacts
from .client import ChatCompletionClient, complete
from .messages import Message, OneShotExample, PromptBundle, build_prompt

__all__ = [
    "ChatCompletionClient",
    "Message",
    "OneShotExample",
    "PromptBundle",
    "RunArtifacts",
    "build_prompt",
    "complete",
]
