"""OpenAI-compatible chat-completions backend over HTTP.

Both annotator roles (multimodal captioner, text-only assistant) sit behind
this wire shape; images travel as base64 PNG data URLs inside the user
message content. Credentials come from an environment variable named in the
backend config, never from the config file itself.
"""

from __future__ import annotations

import base64
import json
import os
from pathlib import Path

import requests

from ..errors import BackendUnavailable, ConfigError, ContentRefusal, TransientBackendError
from .gateway import ChatRequest

_TRANSIENT_STATUS = {408, 425, 429, 500, 502, 503, 504}


class OpenAIChatBackend:
    def __init__(
        self,
        backend_id: str,
        base_url: str,
        model: str,
        api_key_env: str,
        timeout_s: float = 120.0,
        session=None,
    ):
        self.backend_id = backend_id
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.timeout_s = timeout_s
        self.session = session or requests.Session()
        api_key = os.environ.get(api_key_env, "")
        if not api_key:
            raise ConfigError(
                f"backend {backend_id!r}: environment variable {api_key_env!r} is not set"
            )
        self._headers = {"Authorization": f"Bearer {api_key}"}

    def payload(self, request: ChatRequest) -> dict:
        messages = []
        for m in request.messages:
            if m.images:
                content = [{"type": "text", "text": m.text}]
                for png in m.images:
                    data = base64.b64encode(png).decode("ascii")
                    content.append(
                        {"type": "image_url", "image_url": {"url": f"data:image/png;base64,{data}"}}
                    )
                messages.append({"role": m.role, "content": content})
            else:
                messages.append({"role": m.role, "content": m.text})
        return {
            "model": self.model,
            "messages": messages,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }

    def send(self, request: ChatRequest) -> str:
        try:
            resp = self.session.post(
                f"{self.base_url}/chat/completions",
                json=self.payload(request),
                headers=self._headers,
                timeout=self.timeout_s,
            )
        except requests.RequestException as exc:
            raise TransientBackendError(f"{self.backend_id}: {exc}") from exc
        if resp.status_code in _TRANSIENT_STATUS:
            raise TransientBackendError(f"{self.backend_id}: HTTP {resp.status_code}")
        if resp.status_code != 200:
            raise BackendUnavailable(
                f"{self.backend_id}: HTTP {resp.status_code}: {resp.text[:200]}"
            )
        try:
            doc = resp.json()
            choice = doc["choices"][0]
        except (ValueError, KeyError, IndexError) as exc:
            raise BackendUnavailable(f"{self.backend_id}: malformed response body") from exc
        if choice.get("finish_reason") == "content_filter":
            raise ContentRefusal(f"{self.backend_id}: response filtered")
        message = choice.get("message", {})
        if message.get("refusal"):
            raise ContentRefusal(f"{self.backend_id}: {message['refusal'][:200]}")
        content = message.get("content")
        if not isinstance(content, str):
            raise BackendUnavailable(f"{self.backend_id}: response has no text content")
        return content


def load_backend_configs(path) -> list[dict]:
    """Read the backend config file (a JSON list of backend entries)."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"no such backend config: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if isinstance(doc, dict):
        doc = [doc]
    for entry in doc:
        if "backend_id" not in entry:
            raise ConfigError(f"{path}: backend entry missing backend_id")
    return doc


def build_backend(entry: dict):
    """Instantiate one backend from its config entry."""
    kind = entry.get("type", "openai")
    if kind == "mock":
        from .mock import MockBackend

        return MockBackend(seed=int(entry.get("seed", 0)))
    if kind == "openai":
        try:
            return OpenAIChatBackend(
                backend_id=entry["backend_id"],
                base_url=entry["base_url"],
                model=entry["model"],
                api_key_env=entry["api_key_env"],
                timeout_s=float(entry.get("timeout_s", 120.0)),
            )
        except KeyError as exc:
            raise ConfigError(f"backend {entry['backend_id']!r}: missing field {exc}") from exc
    raise ConfigError(f"unknown backend type {kind!r}")
