"""Versioned prompt templates, one file per pipeline stage.

Templates are JSON documents shipped as package data; rendering is a pure
string substitution so identical inputs always produce identical bytes.
Provenance records cite the sha256 of the template file.
"""

from __future__ import annotations

import hashlib
import json
import string
from functools import lru_cache
from importlib import resources

from ..errors import UnboundPlaceholder, UnknownTemplate
from .gateway import ChatMessage

TEMPLATE_IDS = (
    "object_caption",
    "frame_caption",
    "scene_caption",
    "style_adapt",
    "identify_object",
    "gen_questions",
    "verify_question",
)


@lru_cache(maxsize=None)
def _load(template_id: str) -> tuple[dict, str]:
    if template_id not in TEMPLATE_IDS:
        raise UnknownTemplate(f"no template {template_id!r}")
    ref = resources.files("scanforge.llm").joinpath(f"templates/{template_id}.json")
    raw = ref.read_bytes()
    return json.loads(raw.decode("utf-8")), hashlib.sha256(raw).hexdigest()


def template_hash(template_id: str) -> str:
    return _load(template_id)[1]


def placeholders(template_id: str) -> set[str]:
    doc = _load(template_id)[0]
    names = set()
    for part in (doc.get("system", ""), doc["user"]):
        for _, field, _, _ in string.Formatter().parse(part):
            if field:
                names.add(field)
    return names


def render_prompt(template_id: str, variables: dict[str, str] | None = None) -> list[ChatMessage]:
    """Substitute variables into the template; every placeholder must bind."""
    variables = variables or {}
    doc = _load(template_id)[0]
    missing = placeholders(template_id) - set(variables)
    if missing:
        raise UnboundPlaceholder(
            f"template {template_id!r} missing variables: {', '.join(sorted(missing))}"
        )
    messages = []
    if doc.get("system"):
        messages.append(ChatMessage(role="system", text=doc["system"].format_map(variables)))
    messages.append(ChatMessage(role="user", text=doc["user"].format_map(variables)))
    return messages
