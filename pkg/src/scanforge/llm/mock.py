"""Deterministic stand-ins for the caption backends.

MockBackend answers every pipeline template without a network or a model.
Because it cannot see images, the target category reaches it through a
test-only side channel: a `[hint category="..."]` line appended to caption
prompts, plus a hex marker `[[oid:...]]` the mock embeds in every text it
generates. The marker survives the category-word masking that the
consistency check applies, exactly like visual grounding would for a real
annotator, while the plain category word does not.
"""

from __future__ import annotations

import random
import re

from ..errors import TransientBackendError
from .gateway import ChatRequest

_HINT_RE = re.compile(r'\[hint category="([^"]+)"\]')
_MARKER_RE = re.compile(r"\[\[oid:([0-9a-f]+)\]\]")

_ADJECTIVES = ("sturdy", "compact", "well-worn", "brushed", "angular", "rounded", "matte", "glossy")
_MATERIALS = ("wood", "metal", "fabric", "plastic", "stone composite", "laminate")
_SPOTS = ("near the center of the room", "close to one wall", "beside the walking path",
          "toward the corner", "a short step from the room's middle")
_EVENTS = ("tidying up before guests arrive", "looking for a place to set down a tray",
           "rearranging the room for a meeting", "cleaning the floor on a weekend morning",
           "setting up for a quiet evening", "unpacking after a move")
_CUES = ("the one sitting apart on open floor", "the piece nearest the room's center",
         "the item a visitor notices first", "the one with clear space around it",
         "the piece off to one side", "the one along the walking path",
         "the freest-standing piece there", "the one easiest to reach")


def category_marker(category: str) -> str:
    return f"[[oid:{category.encode('utf-8').hex()}]]"


def markers_in(text: str) -> list[str]:
    """Decode every category marker, unique, in order of first appearance."""
    seen = []
    for match in _MARKER_RE.finditer(text):
        try:
            cat = bytes.fromhex(match.group(1)).decode("utf-8")
        except ValueError:
            continue
        if cat not in seen:
            seen.append(cat)
    return seen


class MockBackend:
    """Answers derived only from (seed, request content): bit-deterministic."""

    model = "mock-annotator-v1"

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.calls = 0

    def send(self, request: ChatRequest) -> str:
        self.calls += 1
        rng = random.Random(f"{self.seed}:{request.request_hash()}")
        handler = getattr(self, f"_{request.template_id}", None)
        if handler is None:
            return "acknowledged"
        return handler(request, rng)

    # -- helpers ---------------------------------------------------------------

    def _category(self, request: ChatRequest) -> str:
        text = request.user_text()
        hint = _HINT_RE.search(text)
        if hint:
            return hint.group(1)
        found = markers_in(text)
        return found[0] if found else "unknown"

    # -- per-template behaviour --------------------------------------------------

    def _object_caption(self, request, rng):
        cat = self._category(request)
        return (
            f"A {rng.choice(_ADJECTIVES)} {cat} made of {rng.choice(_MATERIALS)}, "
            f"with {rng.choice(_ADJECTIVES)} edges and an even finish. {category_marker(cat)}"
        )

    def _frame_caption(self, request, rng):
        cat = self._category(request)
        return (
            f"The outlined {cat} stands {rng.choice(_SPOTS)}, with clear floor around it "
            f"and the nearest furniture {rng.choice(('just beside it', 'a stride away'))}. "
            f"{category_marker(cat)}"
        )

    def _scene_caption(self, request, rng):
        cat = self._category(request)
        extra = rng.choice(
            (
                "From the far viewpoints it reads as the most prominent piece on its side of the room.",
                "Across viewpoints it keeps a constant gap from the surrounding pieces.",
                "Seen from opposite sides, nothing overlaps or leans on it.",
            )
        )
        return (
            f"Within the room the highlighted {cat} occupies a spot {rng.choice(_SPOTS)}. "
            f"{extra} {category_marker(cat)}"
        )

    def _style_adapt(self, request, rng):
        cats = markers_in(request.user_text())
        cat = cats[0] if cats else self._category(request)
        tail = rng.choice(
            (
                "it is the one a visitor would reach first when crossing the room",
                "it sits apart from everything else on open floor",
                "its placing makes it the natural anchor of that side of the room",
            )
        )
        return (
            f"Find the {rng.choice(_ADJECTIVES)} {cat} positioned {rng.choice(_SPOTS)}; "
            f"{tail}. {category_marker(cat)}"
        )

    def _identify_object(self, request, rng):
        found = markers_in(request.user_text())
        if found:
            return ", ".join(found)
        hint = _HINT_RE.search(request.user_text())
        return hint.group(1) if hint else "unknown"

    def _gen_questions(self, request, rng):
        cat = self._category(request)
        count = int(request.variables.get("count", "2"))
        lines = []
        events = rng.sample(_EVENTS, k=min(count, len(_EVENTS))) if count else []
        while len(events) < count:
            events.append(rng.choice(_EVENTS))
        for i, event in enumerate(events):
            lines.append(
                f"{i + 1}. While {event}, which {cat} would you go to first, "
                f"{rng.choice(_CUES)}? {category_marker(cat)}"
            )
        return "\n".join(lines)

    def _verify_question(self, request, rng):
        if "INCONSISTENT" in request.user_text():
            return "inconsistent"
        return "consistent"


class FlakyBackend:
    """Wraps a backend; the first `fail_times` sends raise a transient error."""

    def __init__(self, inner, fail_times: int):
        self.inner = inner
        self.model = getattr(inner, "model", "flaky")
        self.fail_times = fail_times
        self.sends = 0

    def send(self, request):
        self.sends += 1
        if self.sends <= self.fail_times:
            raise TransientBackendError(f"scripted failure {self.sends}/{self.fail_times}")
        return self.inner.send(request)


class ScriptedBackend:
    """Replays a fixed sequence of responses; exceptions in the list are raised."""

    model = "scripted"

    def __init__(self, script):
        self.script = list(script)
        self.sends = 0

    def send(self, request):
        if not self.script:
            raise TransientBackendError("script exhausted")
        self.sends += 1
        item = self.script.pop(0)
        if isinstance(item, Exception):
            raise item
        return item
