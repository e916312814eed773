from .gateway import (
    ChatExchange,
    ChatMessage,
    ChatRequest,
    Gateway,
    ResponseCache,
    RetryPolicy,
    SlidingWindowLimiter,
)
from .http_backend import OpenAIChatBackend, build_backend, load_backend_configs
from .mock import FlakyBackend, MockBackend, ScriptedBackend, category_marker, markers_in
from .templates import TEMPLATE_IDS, placeholders, render_prompt, template_hash

__all__ = [
    "ChatExchange",
    "ChatMessage",
    "ChatRequest",
    "Gateway",
    "ResponseCache",
    "RetryPolicy",
    "SlidingWindowLimiter",
    "OpenAIChatBackend",
    "build_backend",
    "load_backend_configs",
    "FlakyBackend",
    "MockBackend",
    "ScriptedBackend",
    "category_marker",
    "markers_in",
    "TEMPLATE_IDS",
    "placeholders",
    "render_prompt",
    "template_hash",
]
