"""Text-completion backends: a chat HTTP client plus replay/mock sources.

The HTTP client speaks the common chat-completion wire shape
(``POST {model, messages, temperature}`` -> ``choices[0].message.content``)
so any hosted or local server with that schema plugs in. Transport failures
retry with exponential backoff; every call's latency is recorded.
"""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass
from typing import Callable, Optional

import httpx

from .core import BackendFailure, ReplayExhausted

log = logging.getLogger("coord_arena.backends")

API_KEY_ENV = "COORD_ARENA_API_KEY"
RETRY_BASE_SECONDS = 1.0
RETRY_FACTOR = 2.0
MAX_ATTEMPTS = 5
RETRYABLE_STATUS = {429}


@dataclass
class CallRecord:
    backend: str
    latency: float
    attempts: int = 1
    prompt_tokens: Optional[int] = None
    completion_tokens: Optional[int] = None


class HttpChatBackend:
    """Chat-completion client with bounded exponential-backoff retries."""

    kind = "http-chat"

    def __init__(
        self,
        endpoint: str,
        model: str,
        temperature: float = 0.0,
        api_key: Optional[str] = None,
        timeout: float = 60.0,
        sleep: Callable[[float], None] = time.sleep,
        client: Optional[httpx.Client] = None,
    ):
        self.endpoint = endpoint
        self.model = model
        self.temperature = temperature
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self.timeout = timeout
        self._sleep = sleep
        self._client = client or httpx.Client(timeout=timeout)
        self.calls: list[CallRecord] = []

    @property
    def name(self) -> str:
        return f"http:{self.model}"

    def complete(self, messages: list[dict]) -> str:
        if not messages:
            raise ValueError("messages must be nonempty")
        body = {
            "model": self.model,
            "messages": messages,
            "temperature": self.temperature,
        }
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        delay = RETRY_BASE_SECONDS
        started = time.monotonic()
        last_error = None
        for attempt in range(1, MAX_ATTEMPTS + 1):
            try:
                response = self._client.post(self.endpoint, json=body, headers=headers)
            except (httpx.TimeoutException, httpx.TransportError) as exc:
                last_error = f"transport error: {exc}"
            else:
                if response.status_code == 200:
                    payload = response.json()
                    usage = payload.get("usage") or {}
                    record = CallRecord(
                        backend=self.name,
                        latency=time.monotonic() - started,
                        attempts=attempt,
                        prompt_tokens=usage.get("prompt_tokens"),
                        completion_tokens=usage.get("completion_tokens"),
                    )
                    self.calls.append(record)
                    log.info(
                        "backend=%s latency=%.3fs attempts=%d tokens=%s/%s",
                        record.backend,
                        record.latency,
                        record.attempts,
                        record.prompt_tokens,
                        record.completion_tokens,
                    )
                    return payload["choices"][0]["message"]["content"]
                if (
                    response.status_code not in RETRYABLE_STATUS
                    and response.status_code < 500
                ):
                    raise BackendFailure(
                        f"{self.name}: HTTP {response.status_code}: {response.text[:200]}"
                    )
                last_error = f"HTTP {response.status_code}"
            if attempt < MAX_ATTEMPTS:
                self._sleep(delay)
                delay *= RETRY_FACTOR
        raise BackendFailure(
            f"{self.name}: gave up after {MAX_ATTEMPTS} attempts ({last_error})"
        )


class ReplayBackend:
    """Pops scripted responses in order; latency is zero by definition."""

    kind = "replay"

    def __init__(self, script: list[str], name: str = "replay"):
        self.script = list(script)
        self.name = name
        self._cursor = 0
        self.calls: list[CallRecord] = []

    def complete(self, messages: list[dict]) -> str:
        if self._cursor >= len(self.script):
            raise ReplayExhausted(f"{self.name}: script exhausted after {self._cursor} calls")
        text = self.script[self._cursor]
        self._cursor += 1
        self.calls.append(CallRecord(backend=self.name, latency=0.0))
        return text


def complete(backend, messages: list[dict]) -> str:
    """Functional entry point over any backend object."""
    roles = {m.get("role") for m in messages}
    if not roles <= {"system", "user", "assistant"}:
        raise ValueError(f"unsupported roles: {roles}")
    return backend.complete(messages)


def latency_stats(backend) -> tuple[float, float]:
    """Mean and population std-dev of recorded call latencies."""
    samples = [c.latency for c in getattr(backend, "calls", [])]
    if not samples:
        return (0.0, 0.0)
    mean = sum(samples) / len(samples)
    var = sum((s - mean) ** 2 for s in samples) / len(samples)
    return (mean, var**0.5)
