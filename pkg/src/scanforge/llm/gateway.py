"""Uniform gateway to chat-completion backends.

One code path serves the multimodal annotator, the text-only assistant, and
the deterministic mock: requests are canonicalized and content-addressed, a
JSONL cache makes reruns free, a sliding-window limiter paces dispatches, and
transient failures retry with exponential backoff.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from collections import deque
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..errors import (
    BackendUnavailable,
    BudgetExceeded,
    ConfigError,
    ContentRefusal,
    SchemaViolation,
    TransientBackendError,
)


@dataclass(frozen=True)
class ChatMessage:
    role: str  # "system" | "user"
    text: str
    images: tuple[bytes, ...] = ()  # PNG bytes, user messages only


@dataclass(frozen=True)
class ChatRequest:
    backend_id: str
    messages: tuple[ChatMessage, ...]
    temperature: float = 0.2
    max_tokens: int = 512
    template_id: str = ""
    variables: dict = field(default_factory=dict)

    def validate(self):
        if not any(m.role == "user" for m in self.messages):
            raise SchemaViolation("request needs at least one user message")
        for m in self.messages:
            if m.role not in ("system", "user"):
                raise SchemaViolation(f"bad message role {m.role!r}")
            if m.images and m.role != "user":
                raise SchemaViolation("images are only allowed on user messages")
        if not 0.0 <= self.temperature <= 2.0:
            raise SchemaViolation(f"temperature {self.temperature} outside [0, 2]")

    def canonical(self) -> str:
        """Stable JSON canonicalization; image payloads enter by content hash."""
        doc = {
            "backend_id": self.backend_id,
            "messages": [
                {
                    "role": m.role,
                    "text": m.text,
                    "images": [hashlib.sha256(b).hexdigest() for b in m.images],
                }
                for m in self.messages
            ],
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
            "template_id": self.template_id,
            "variables": {str(k): str(v) for k, v in self.variables.items()},
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=True)

    def request_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode("utf-8")).hexdigest()

    def user_text(self) -> str:
        return "\n".join(m.text for m in self.messages if m.role == "user")

    def with_hint(self, category: str) -> "ChatRequest":
        """Append the test-only category side channel to the last user message."""
        msgs = list(self.messages)
        for i in range(len(msgs) - 1, -1, -1):
            if msgs[i].role == "user":
                msgs[i] = replace(msgs[i], text=msgs[i].text + f'\n\n[hint category="{category}"]')
                break
        return replace(self, messages=tuple(msgs))


@dataclass(frozen=True)
class ChatExchange:
    request_hash: str
    response_text: str
    attempts: int
    backend_model: str
    cached: bool = False


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    base_delay_s: float = 0.5
    max_delay_s: float = 8.0


class SlidingWindowLimiter:
    """No more than `rate` dispatches in any 1-second window."""

    def __init__(self, rate_per_s: int, clock=time.monotonic, sleep=time.sleep):
        self.rate = int(rate_per_s)
        self.clock = clock
        self.sleep = sleep
        self._times = deque()
        self._lock = threading.Lock()

    def acquire(self):
        with self._lock:
            while True:
                now = self.clock()
                while self._times and self._times[0] <= now - 1.0:
                    self._times.popleft()
                if len(self._times) < self.rate:
                    self._times.append(now)
                    return
                self.sleep(self._times[0] + 1.0 - now)


class ResponseCache:
    """Content-addressed exchange store, one JSONL file per backend.

    Writes go through a temp file and an atomic rename; a torn final line
    from a crash is skipped on load.
    """

    def __init__(self, path: Path | None):
        self.path = Path(path) if path else None
        self._entries: dict[str, dict] = {}
        self._lock = threading.Lock()
        if self.path and self.path.exists():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                line = line.strip()
                if not line:
                    continue
                try:
                    entry = json.loads(line)
                except json.JSONDecodeError:
                    continue
                self._entries[entry["request_hash"]] = entry

    def get(self, request_hash: str) -> ChatExchange | None:
        entry = self._entries.get(request_hash)
        if entry is None:
            return None
        return ChatExchange(
            request_hash=entry["request_hash"],
            response_text=entry["response_text"],
            attempts=int(entry["attempts"]),
            backend_model=entry["backend_model"],
            cached=True,
        )

    def put(self, exchange: ChatExchange):
        entry = {
            "request_hash": exchange.request_hash,
            "response_text": exchange.response_text,
            "attempts": exchange.attempts,
            "backend_model": exchange.backend_model,
        }
        with self._lock:
            self._entries[exchange.request_hash] = entry
            if self.path is None:
                return
            self.path.parent.mkdir(parents=True, exist_ok=True)
            tmp = self.path.with_suffix(".tmp")
            with tmp.open("w", encoding="utf-8") as fh:
                for e in self._entries.values():
                    fh.write(json.dumps(e, sort_keys=True) + "\n")
            os.replace(tmp, self.path)

    def __len__(self):
        return len(self._entries)


class Gateway:
    """Front door for all chat completions.

    Cache hits never touch the network or the rate limiter. `network_calls`
    counts actual dispatch attempts, which the budget caps.
    """

    def __init__(
        self,
        backends: dict,
        cache_dir=None,
        rate_limits: dict | None = None,
        budget: int | None = None,
        clock=time.monotonic,
        sleep=time.sleep,
    ):
        self.backends = dict(backends)
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self.budget = budget
        self.sleep = sleep
        self.network_calls = 0
        self._caches = {}
        self._limiters = {}
        for backend_id, rate in (rate_limits or {}).items():
            if rate:
                self._limiters[backend_id] = SlidingWindowLimiter(rate, clock=clock, sleep=sleep)

    def cache_for(self, backend_id: str) -> ResponseCache:
        if backend_id not in self._caches:
            path = self.cache_dir / f"{backend_id}.jsonl" if self.cache_dir else None
            self._caches[backend_id] = ResponseCache(path)
        return self._caches[backend_id]

    def complete(self, request: ChatRequest, policy: RetryPolicy = RetryPolicy()) -> ChatExchange:
        request.validate()
        if request.backend_id not in self.backends:
            raise ConfigError(f"no backend configured with id {request.backend_id!r}")
        cache = self.cache_for(request.backend_id)
        h = request.request_hash()
        hit = cache.get(h)
        if hit is not None:
            return hit

        backend = self.backends[request.backend_id]
        delay = policy.base_delay_s
        last_error = None
        for attempt in range(1, policy.max_attempts + 1):
            if self.budget is not None and self.network_calls >= self.budget:
                raise BudgetExceeded(
                    f"network call budget of {self.budget} exhausted "
                    f"(requesting {request.template_id or 'completion'})"
                )
            limiter = self._limiters.get(request.backend_id)
            if limiter is not None:
                limiter.acquire()
            self.network_calls += 1
            try:
                text = backend.send(request)
            except TransientBackendError as exc:
                last_error = exc
                if attempt < policy.max_attempts:
                    self.sleep(delay)
                    delay = min(delay * 2.0, policy.max_delay_s)
                continue
            except ContentRefusal:
                raise
            exchange = ChatExchange(
                request_hash=h,
                response_text=text,
                attempts=attempt,
                backend_model=getattr(backend, "model", request.backend_id),
                cached=False,
            )
            cache.put(exchange)
            return exchange
        raise BackendUnavailable(
            f"backend {request.backend_id!r} failed after {policy.max_attempts} attempts: {last_error}"
        )
