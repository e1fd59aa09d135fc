"""Chat-completion HTTP client with retry/backoff and verbatim request/response persistence."""

from __future__ import annotations

import json
import logging
import time
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence

import httpx
from tenacity import (
    RetryCallState,
    Retrying,
    retry_if_exception,
    stop_after_attempt,
    wait_exponential,
)

from ..config import LlmConfig
from ..error_handling import LLMError, MalformedResponseError, RetriesExhaustedError, format_error_message
from ..utils.fs_extra import atomic_write_text
from .messages import Message

logger = logging.getLogger("sdohkit.llm")

RETRY_STATUSES = frozenset({429, 500, 502, 503, 504})


class _RetryableStatus(Exception):
    def __init__(self, status: int, body: str) -> None:
        super().__init__(f"HTTP {status}")
        self.status = status
        self.body = body


def _retryable(exc: BaseException) -> bool:
    return isinstance(exc, (_RetryableStatus, httpx.TransportError))


def _log_backoff(state: RetryCallState) -> None:
    exc = state.outcome.exception() if state.outcome else None
    delay = state.next_action.sleep if state.next_action else 0.0
    logger.warning("attempt %d failed (%s); backing off %.2fs", state.attempt_number, exc, delay)


def extract_content(data: Any) -> str:
    """First choice's message content from a chat-completion body."""
    if not isinstance(data, dict) or "choices" not in data:
        raise MalformedResponseError("choices")
    choices = data["choices"]
    if not isinstance(choices, list) or not choices:
        raise MalformedResponseError("choices[0]")
    first = choices[0]
    if not isinstance(first, dict) or not isinstance(first.get("message"), dict):
        raise MalformedResponseError("choices[0].message")
    content = first["message"].get("content")
    if not isinstance(content, str):
        raise MalformedResponseError("choices[0].message.content")
    return content


class ChatCompletionClient:
    """POSTs {model, messages, temperature} to any chat-completion-shaped endpoint."""

    def __init__(
        self,
        config: LlmConfig,
        transport: Optional[httpx.BaseTransport] = None,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        self.config = config
        self._sleep = sleep
        self._http = httpx.Client(transport=transport, timeout=config.timeout)

    def close(self) -> None:
        self._http.close()

    def __enter__(self) -> "ChatCompletionClient":
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self.close()

    def request_body(self, messages: Sequence[Message]) -> Dict[str, Any]:
        body: Dict[str, Any] = {
            "model": self.config.model,
            "messages": [m.as_dict() for m in messages],
            "temperature": self.config.temperature,
        }
        if self.config.max_tokens is not None:
            body["max_tokens"] = self.config.max_tokens
        return body

    def complete(
        self, messages: Sequence[Message], persist_dir: Optional[Path] = None, name: str = "request"
    ) -> str:
        """Return the first choice's content; raw exchanges land in persist_dir first."""
        key = self.config.api_key()
        body = self.request_body(messages)
        if persist_dir is not None:
            atomic_write_text(Path(persist_dir) / f"{name}.request.json", json.dumps(body, indent=2, ensure_ascii=False) + "\n")

        attempts = {"n": 0}

        def send() -> httpx.Response:
            attempts["n"] += 1
            response = self._http.post(
                self.config.endpoint, json=body, headers={"Authorization": f"Bearer {key}"}
            )
            if persist_dir is not None:
                atomic_write_text(Path(persist_dir) / f"{name}.response.{attempts['n']}.json", response.text)
            logger.debug("%s attempt %d -> HTTP %d", name, attempts["n"], response.status_code)
            if response.status_code in RETRY_STATUSES:
                raise _RetryableStatus(response.status_code, response.text)
            return response

        retrying = Retrying(
            stop=stop_after_attempt(self.config.max_retries + 1),
            wait=wait_exponential(multiplier=self.config.backoff_base, max=60),
            retry=retry_if_exception(_retryable),
            before_sleep=_log_backoff,
            sleep=self._sleep,
            reraise=True,
        )
        try:
            response = retrying(send)
        except _RetryableStatus as e:
            raise RetriesExhaustedError(
                format_error_message("RETRIES_EXHAUSTED", attempts=attempts["n"], status=e.status),
                attempts["n"], e.status,
            ) from e
        except httpx.TransportError as e:
            raise RetriesExhaustedError(
                format_error_message("RETRIES_EXHAUSTED", attempts=attempts["n"], status=f"none ({e})"),
                attempts["n"], None,
            ) from e

        if response.status_code >= 400:
            raise LLMError(
                f"endpoint returned HTTP {response.status_code}: {response.text[:200]}",
                {"status": response.status_code},
            )
        try:
            data = response.json()
        except ValueError as e:
            raise MalformedResponseError("JSON body") from e
        return extract_content(data)


def complete(
    messages: Sequence[Message],
    config: LlmConfig,
    transport: Optional[httpx.BaseTransport] = None,
    persist_dir: Optional[Path] = None,
    name: str = "request",
) -> str:
    with ChatCompletionClient(config, transport=transport) as client:
        return client.complete(messages, persist_dir=persist_dir, name=name)
