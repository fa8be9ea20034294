"""Submit prompts to language-model providers.

Two providers ship here: an HTTP provider speaking the OpenAI-style
completion/chat JSON wire format, and a replay provider that serves
recorded completions keyed by a content hash of (model wire name, prompt
text) so the whole pipeline runs offline and deterministically.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import httpx

from .errors import (
    AuthFailed,
    ContextOverflow,
    FixtureMissing,
    GatewayError,
    ProviderTimeout,
    ProviderUnavailable,
    RateLimited,
)

COMPLETION = "completion"
CHAT = "chat"

DEFAULT_TEMPERATURE = 0.0
DEFAULT_MAX_TOKENS = 500
DEFAULT_STOP = ("plt.show()",)

RETRY_BASE_S = 1.0
RETRY_FACTOR = 2.0


@dataclass(frozen=True)
class ModelId:
    kind: str  # completion | chat
    wire_name: str

    def __post_init__(self) -> None:
        if self.kind not in (COMPLETION, CHAT):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if not self.wire_name:
            raise ValueError("wire_name must be non-empty")


GPT3 = ModelId(COMPLETION, "text-davinci-003")
CODEX = ModelId(COMPLETION, "code-davinci-002")
CHATGPT = ModelId(CHAT, "gpt-3.5-turbo")

KNOWN_MODELS = {m.wire_name: m for m in (GPT3, CODEX, CHATGPT)}


@dataclass(frozen=True)
class CompletionRequest:
    model: ModelId
    prompt_text: str
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS
    stop: tuple[str, ...] = DEFAULT_STOP


@dataclass(frozen=True)
class CompletionResult:
    raw_text: str
    finish_reason: str  # stop | length | other
    latency_ms: int
    provider_name: str

    def __post_init__(self) -> None:
        if not self.raw_text and self.finish_reason != "other":
            raise ValueError("empty raw_text requires finish_reason 'other'")


class Secret:
    """Holds a credential without ever rendering it. ``reveal()`` is the only
    way out."""

    def __init__(self, value: str) -> None:
        self._value = value

    def reveal(self) -> str:
        return self._value

    def __repr__(self) -> str:
        return "Secret('****')"

    __str__ = __repr__

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Secret) and other._value == self._value


@dataclass(frozen=True)
class ProviderConfig:
    base_url: str = "https://api.openai.com/v1"
    api_key: Secret = field(default_factory=lambda: Secret(""))
    timeout_s: int = 60
    max_retries: int = 3

    def __post_init__(self) -> None:
        if self.timeout_s <= 0:
            raise ValueError("timeout_s must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


class Provider(Protocol):
    name: str

    def complete(self, request: CompletionRequest) -> CompletionResult:
        ...


def complete(request: CompletionRequest, provider: Provider) -> CompletionResult:
    """Validate and dispatch a request to the given provider."""
    if not request.prompt_text:
        raise ValueError("prompt_text must be non-empty")
    return provider.complete(request)


def fixture_key(wire_name: str, prompt_text: str) -> str:
    """Content hash identifying one recorded completion."""
    digest = hashlib.sha256()
    digest.update(wire_name.encode("utf-8"))
    digest.update(b"\x00")
    digest.update(prompt_text.encode("utf-8"))
    return digest.hexdigest()


class ReplayProvider:
    """Pure function from (model wire name, prompt text) to a recorded
    completion. The store directory holds an index.json mapping content
    hashes to fixture paths relative to the store root."""

    name = "replay"

    def __init__(self, store: str | Path) -> None:
        self.store = Path(store)
        if not self.store.is_dir():
            raise FileNotFoundError(f"fixture store not found: {self.store}")
        self.index_path = self.store / "index.json"
        if self.index_path.is_file():
            self._index: dict[str, str] = json.loads(
                self.index_path.read_text(encoding="utf-8")
            )
        else:
            self._index = {}

    def complete(self, request: CompletionRequest) -> CompletionResult:
        key = fixture_key(request.model.wire_name, request.prompt_text)
        rel_path = self._index.get(key)
        if rel_path is None:
            raise FixtureMissing(
                f"no recorded completion for model "
                f"{request.model.wire_name!r} with prompt hash {key}; "
                f"expected {self.index_path} to map it to "
                f"<case>/{request.model.wire_name}.txt"
            )
        raw_text = (self.store / rel_path).read_text(encoding="utf-8")
        return CompletionResult(
            raw_text=raw_text,
            finish_reason="stop",
            latency_ms=0,
            provider_name=self.name,
        )


def replay_provider(store: str | Path) -> ReplayProvider:
    return ReplayProvider(store)


def _is_context_overflow(status_code: int, body: str) -> bool:
    return status_code == 400 and "context" in body.lower()


class HttpProvider:
    """OpenAI-style HTTP provider.

    Completion-kind requests go to /completions with the stop list passed
    through (the provider halts before the marker, so it never appears in
    raw_text). Chat-kind requests go to /chat/completions as a single user
    message with no stop list; the full reply comes back, fences and prose
    included, for the sanitizer to deal with.

    Retries with exponential backoff apply to rate limiting and transient
    unavailability only.
    """

    def __init__(
        self,
        config: ProviderConfig,
        transport: httpx.BaseTransport | None = None,
        sleep=time.sleep,
        max_in_flight: int = 4,
    ) -> None:
        self.config = config
        self.name = "http"
        self._sleep = sleep
        self._in_flight = threading.BoundedSemaphore(max_in_flight)
        self._client = httpx.Client(
            base_url=config.base_url,
            timeout=config.timeout_s,
            transport=transport,
        )

    def close(self) -> None:
        self._client.close()

    def _payload(self, request: CompletionRequest) -> tuple[str, dict]:
        if request.model.kind == COMPLETION:
            return "/completions", {
                "model": request.model.wire_name,
                "prompt": request.prompt_text,
                "temperature": request.temperature,
                "max_tokens": request.max_tokens,
                "stop": list(request.stop),
            }
        return "/chat/completions", {
            "model": request.model.wire_name,
            "messages": [{"role": "user", "content": request.prompt_text}],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }

    def _extract_text(self, request: CompletionRequest, data: dict) -> tuple[str, str]:
        choice = data["choices"][0]
        reason = choice.get("finish_reason", "other")
        if reason not in ("stop", "length"):
            reason = "other"
        if request.model.kind == COMPLETION:
            return choice.get("text", ""), reason
        return choice.get("message", {}).get("content", ""), reason

    def complete(self, request: CompletionRequest) -> CompletionResult:
        path, payload = self._payload(request)
        headers = {"Authorization": f"Bearer {self.config.api_key.reveal()}"}
        attempt = 0
        started = time.monotonic()
        while True:
            retryable: Exception
            try:
                with self._in_flight:
                    response = self._client.post(
                        path, json=payload, headers=headers
                    )
            except httpx.TimeoutException as exc:
                raise ProviderTimeout(str(exc)) from exc
            except httpx.TransportError as exc:
                retryable = ProviderUnavailable(str(exc))
            else:
                if response.status_code == 200:
                    data = response.json()
                    text, reason = self._extract_text(request, data)
                    latency_ms = int((time.monotonic() - started) * 1000)
                    if not text:
                        reason = "other"
                    return CompletionResult(
                        raw_text=text,
                        finish_reason=reason,
                        latency_ms=latency_ms,
                        provider_name=self.name,
                    )
                if response.status_code in (401, 403):
                    raise AuthFailed(f"HTTP {response.status_code}")
                if _is_context_overflow(response.status_code, response.text):
                    raise ContextOverflow(response.text[:200])
                if response.status_code == 429:
                    retryable = RateLimited("HTTP 429")
                elif response.status_code >= 500:
                    retryable = ProviderUnavailable(
                        f"HTTP {response.status_code}"
                    )
                else:
                    raise GatewayError(
                        f"HTTP {response.status_code}: {response.text[:200]}"
                    )
            if attempt >= self.config.max_retries:
                raise retryable
            self._sleep(RETRY_BASE_S * RETRY_FACTOR**attempt)
            attempt += 1
