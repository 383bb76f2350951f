"""Deterministic LLM access layer.

Responsibilities:
  * canonical request fingerprints (sha256 over a sorted-key JSON serialization)
  * a network backend speaking the ``POST {base_url}/chat/completions`` protocol
  * a replay backend answering from a recorded fingerprint -> content map
  * an optional read-through disk cache shared by both backends
  * bounded-parallelism fan-out for batches of independent requests

Every prompt rendered by the rest of the package flows through here, so replay
files captured once drive the whole pipeline offline.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

API_KEY_ENV = "LAZYLINT_API_KEY"


class GatewayError(RuntimeError):
    """Transport or scripting failure while obtaining a completion."""


class UnscriptedRequestError(GatewayError):
    """A replay backend was asked for a fingerprint it does not hold."""

    def __init__(self, fingerprint: str):
        super().__init__(f"no scripted response for fingerprint {fingerprint}")
        self.fingerprint = fingerprint


@dataclass(frozen=True, slots=True)
class ChatRequest:
    """One chat completion request; hashable content only, no credentials."""

    model: str
    messages: tuple[tuple[str, str], ...]  # (role, content) pairs
    temperature: float = 0.0
    max_tokens: int = 1024

    @classmethod
    def user(cls, content: str, model: str = "default", system: str | None = None,
             temperature: float = 0.0, max_tokens: int = 1024) -> "ChatRequest":
        messages: list[tuple[str, str]] = []
        if system:
            messages.append(("system", system))
        messages.append(("user", content))
        return cls(model=model, messages=tuple(messages),
                   temperature=temperature, max_tokens=max_tokens)

    def to_payload(self) -> dict:
        return {
            "model": self.model,
            "messages": [{"role": r, "content": c} for r, c in self.messages],
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        }


@dataclass(frozen=True, slots=True)
class ChatResponse:
    content: str
    fingerprint: str
    backend: str  # "network" | "replay" | "cache"


def fingerprint(request: ChatRequest) -> str:
    """64-char hex digest of the canonical request serialization."""
    canonical = json.dumps(request.to_payload(), sort_keys=True, ensure_ascii=False,
                           separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class DiskCache:
    """Read-through completion cache: {cache_dir}/{fp[:2]}/{fp}.txt, last write wins."""

    def __init__(self, cache_dir: str | Path):
        self.root = Path(cache_dir)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, fp: str) -> Path:
        return self.root / fp[:2] / f"{fp}.txt"

    def get(self, fp: str) -> str | None:
        path = self._path(fp)
        try:
            return path.read_text(encoding="utf-8")
        except FileNotFoundError:
            return None

    def put(self, fp: str, content: str) -> None:
        path = self._path(fp)
        path.parent.mkdir(parents=True, exist_ok=True)
        # Write-to-temp then rename keeps concurrent writers last-write-wins
        # without readers ever seeing a torn file.
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(content)
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise


class ReplayBackend:
    """Answers from a fingerprint -> content map; optional fallback for misses."""

    name = "replay"

    def __init__(self, responses: Mapping[str, str], fallback: str | None = None):
        self.responses = dict(responses)
        self.fallback = fallback

    @classmethod
    def from_file(cls, path: str | Path, fallback: str | None = None) -> "ReplayBackend":
        with Path(path).open("r", encoding="utf-8") as fh:
            data = json.load(fh)
        if isinstance(data, Mapping) and "responses" in data:
            if fallback is None and data.get("fallback") is not None:
                fallback = data["fallback"]
            data = data["responses"]
        if not isinstance(data, Mapping):
            raise GatewayError(f"replay file {path} must hold a fingerprint map")
        return cls(data, fallback=fallback)

    def complete(self, request: ChatRequest, fp: str) -> str:
        if fp in self.responses:
            return self.responses[fp]
        if self.fallback is not None:
            return self.fallback
        raise UnscriptedRequestError(fp)


class NetworkBackend:
    """OpenAI-compatible chat-completions client with exponential-backoff retries."""

    name = "network"

    def __init__(self, base_url: str, api_key: str | None = None, retries: int = 3,
                 backoff_s: float = 1.0, timeout_s: float = 60.0,
                 sleep: Callable[[float], None] = time.sleep):
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        self.retries = retries
        self.backoff_s = backoff_s
        self.timeout_s = timeout_s
        self._sleep = sleep

    def complete(self, request: ChatRequest, fp: str) -> str:
        import requests  # deferred so replay-only use never needs the dependency at call time

        url = f"{self.base_url}/chat/completions"
        headers = {"Authorization": f"Bearer {self.api_key}",
                   "Content-Type": "application/json"}
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            try:
                resp = requests.post(url, json=request.to_payload(), headers=headers,
                                     timeout=self.timeout_s)
                if resp.status_code >= 500:
                    raise GatewayError(f"server error {resp.status_code}")
                if resp.status_code != 200:
                    raise GatewayError(
                        f"request rejected with {resp.status_code}: {resp.text[:200]}")
                body = resp.json()
                return body["choices"][0]["message"]["content"]
            except GatewayError as exc:
                last_error = exc
                if "rejected" in str(exc):
                    break  # 4xx is not retryable
            except (KeyError, IndexError, TypeError, ValueError) as exc:
                last_error = GatewayError(f"malformed completion payload: {exc}")
                break
            except Exception as exc:  # connection errors, timeouts
                last_error = exc
            if attempt < self.retries:
                self._sleep(self.backoff_s * (2 ** attempt))
        raise GatewayError(f"completion failed after {self.retries + 1} attempts: {last_error}")


class LlmGateway:
    """Routes requests through the cache, then the configured backend."""

    def __init__(self, backend, cache: DiskCache | None = None, parallelism: int = 8):
        self.backend = backend
        self.cache = cache
        self.parallelism = max(1, parallelism)
        self._lock = threading.Lock()
        self.calls = 0  # backend round-trips, cache hits excluded

    def complete(self, request: ChatRequest) -> ChatResponse:
        fp = fingerprint(request)
        if self.cache is not None:
            hit = self.cache.get(fp)
            if hit is not None:
                return ChatResponse(content=hit, fingerprint=fp, backend="cache")
        content = self.backend.complete(request, fp)
        with self._lock:
            self.calls += 1
        if self.cache is not None:
            self.cache.put(fp, content)
        return ChatResponse(content=content, fingerprint=fp, backend=self.backend.name)

    def complete_many(self, requests: Sequence[ChatRequest]) -> list[ChatResponse]:
        """Fan out independent requests; result order matches input order."""
        if not requests:
            return []
        if len(requests) == 1 or self.parallelism == 1:
            return [self.complete(r) for r in requests]
        with ThreadPoolExecutor(max_workers=min(self.parallelism, len(requests))) as pool:
            return list(pool.map(self.complete, requests))


@dataclass(slots=True)
class GatewayConfig:
    """Declarative gateway setup used by the CLI and service."""

    backend: str = "replay"  # "network" | "replay"
    base_url: str = "http://localhost:8080/v1"
    model: str = "default"
    temperature: float = 0.0
    max_tokens: int = 1024
    retries: int = 3
    backoff_s: float = 1.0
    timeout_s: float = 60.0
    replay_path: str | None = None
    replay_fallback: str | None = None
    cache_dir: str | None = None
    parallelism: int = 8
    extra_responses: dict[str, str] = field(default_factory=dict)

    def build(self) -> LlmGateway:
        if self.backend == "replay":
            if self.replay_path:
                be = ReplayBackend.from_file(self.replay_path, fallback=self.replay_fallback)
                be.responses.update(self.extra_responses)
            else:
                be = ReplayBackend(self.extra_responses, fallback=self.replay_fallback)
        elif self.backend == "network":
            be = NetworkBackend(self.base_url, retries=self.retries,
                                backoff_s=self.backoff_s, timeout_s=self.timeout_s)
        else:
            raise GatewayError(f"unknown gateway backend {self.backend!r}")
        cache = DiskCache(self.cache_dir) if self.cache_dir else None
        return LlmGateway(be, cache=cache, parallelism=self.parallelism)

    def request(self, content: str, system: str | None = None) -> ChatRequest:
        return ChatRequest.user(content, model=self.model, system=system,
                                temperature=self.temperature, max_tokens=self.max_tokens)


class RecordingBackend:
    """Wraps a rule-based responder and records fingerprint -> content.

    Test and fixture-building aid: run a flow once against deterministic rules,
    dump the recording, then replay it forever.
    """

    name = "network"

    def __init__(self, respond: Callable[[ChatRequest], str]):
        self.respond = respond
        self.recorded: dict[str, str] = {}
        self._lock = threading.Lock()

    def complete(self, request: ChatRequest, fp: str) -> str:
        content = self.respond(request)
        with self._lock:
            self.recorded[fp] = content
        return content
