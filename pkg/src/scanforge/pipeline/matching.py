"""Category matching used by the consistency check and question verification.

Matching is deliberately blunt: lowercase, strip one plural 's', then apply
the editable synonym table. The table ships as a text file so corpus owners
can extend it without touching code.
"""

from __future__ import annotations

import re
from importlib import resources
from pathlib import Path

from ..corpus.records import normalize_category


def load_synonyms(path=None) -> dict[str, str]:
    if path is None:
        text = resources.files("scanforge.pipeline").joinpath("data/synonyms.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    table = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#") or "=" not in line:
            continue
        variant, canonical = line.split("=", 1)
        table[normalize_category(variant)] = normalize_category(canonical)
    return table


def normalize_for_match(name: str, synonyms: dict[str, str] | None = None) -> str:
    """Lowercase, strip a trailing plural 's', then map through synonyms."""
    n = normalize_category(name)
    if n.endswith("s") and len(n) > 1:
        n = n[:-1]
    if synonyms:
        n = synonyms.get(n, n)
    return n


def mask_category(text: str, category: str, replacement: str = "object") -> str:
    """Remove direct mentions of the category (singular or plural) from text."""
    pattern = re.compile(rf"\b{re.escape(category)}s?\b", flags=re.IGNORECASE)
    return pattern.sub(replacement, text)


def parse_category_list(response: str) -> list[str]:
    """Split an identify-style answer into candidate category names."""
    first_line = response.strip().splitlines()[0] if response.strip() else ""
    parts = [p.strip() for p in first_line.split(",")]
    return [p for p in parts if p]
