"""Run configuration: one JSON file wires backends, the gateway, staging
parameters, and filter settings for an annotation run.

Example:

    {
      "backends": [{"backend_id": "mock", "type": "mock", "seed": 1}],
      "mllm_backend": "mock",
      "llm_backend": "mock",
      "store": "store",
      "cache_dir": "cache",
      "images_root": "staged",
      "embed_category_hint": true,
      "questions_per_object": 2,
      "max_attempts": 3,
      "budget": null,
      "rate_limits": {},
      "staging": {"min_area": 50, "splat_radius": 2, "close_kernel": 5},
      "filters": {"blocked_categories": ["wall", "ceiling", "floor"],
                  "min_instances_per_category": 5}
    }

Relative paths resolve against the config file's directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .geom import GeomParams
from .llm.gateway import Gateway, RetryPolicy
from .llm.http_backend import build_backend, load_backend_configs
from .pipeline.records import FilterConfig
from .pipeline.runner import PipelineConfig
from .pipeline.store import JobStore
from .staging import StagingParams


@dataclass
class RunSetup:
    cfg: PipelineConfig
    gateway: Gateway
    store: JobStore
    filters: FilterConfig
    store_root: Path
    images_root: Path


def load_run_setup(config_path) -> RunSetup:
    config_path = Path(config_path)
    if not config_path.exists():
        raise ConfigError(f"no such config: {config_path}")
    try:
        doc = json.loads(config_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{config_path}: invalid JSON: {exc}") from exc
    root = config_path.parent

    def respath(key, default):
        raw = doc.get(key, default)
        p = Path(raw)
        return p if p.is_absolute() else root / p

    backends = {}
    entries = doc.get("backends", [])
    if isinstance(entries, (str, Path)):
        entries = load_backend_configs(root / entries)
    for entry in entries:
        backends[entry["backend_id"]] = build_backend(entry)
    if not backends:
        raise ConfigError(f"{config_path}: no backends configured")

    staging_doc = dict(doc.get("staging", {}))
    geom = GeomParams(
        tolerance_m=float(staging_doc.pop("tolerance_m", 0.05)),
        splat_radius=int(staging_doc.pop("splat_radius", 2)),
        close_kernel=int(staging_doc.pop("close_kernel", 5)),
    )
    staging = StagingParams(
        min_area=int(staging_doc.pop("min_area", 50)),
        context_count=int(staging_doc.pop("context_count", 8)),
        margin_frac=float(staging_doc.pop("margin_frac", 0.1)),
        contour_thickness=int(staging_doc.pop("contour_thickness", 3)),
        geom=geom,
    )
    if staging_doc:
        raise ConfigError(f"{config_path}: unknown staging keys {sorted(staging_doc)}")

    images_root = respath("images_root", "staged")
    store_root = respath("store", "store")
    cfg = PipelineConfig(
        mllm_backend=doc.get("mllm_backend", next(iter(backends))),
        llm_backend=doc.get("llm_backend", next(iter(backends))),
        staging=staging,
        images_root=str(images_root),
        questions_per_object=int(doc.get("questions_per_object", 2)),
        caption_temperature=float(doc.get("caption_temperature", 0.2)),
        question_temperature=float(doc.get("question_temperature", 0.7)),
        max_tokens=int(doc.get("max_tokens", 512)),
        embed_category_hint=bool(doc.get("embed_category_hint", False)),
        retry=RetryPolicy(max_attempts=int(doc.get("max_attempts", 3))),
        synonyms_path=str(respath("synonyms", doc["synonyms"])) if doc.get("synonyms") else None,
    )
    for backend_id in (cfg.mllm_backend, cfg.llm_backend):
        if backend_id not in backends:
            raise ConfigError(f"{config_path}: backend {backend_id!r} is not configured")

    gateway = Gateway(
        backends,
        cache_dir=respath("cache_dir", "cache"),
        rate_limits={k: v for k, v in doc.get("rate_limits", {}).items() if v},
        budget=doc.get("budget"),
    )

    filters_doc = doc.get("filters", {})
    filters = FilterConfig(
        blocked_categories=frozenset(
            filters_doc.get("blocked_categories", ["wall", "ceiling", "floor"])
        ),
        min_instances_per_category=int(filters_doc.get("min_instances_per_category", 5)),
    )
    return RunSetup(
        cfg=cfg,
        gateway=gateway,
        store=JobStore(store_root),
        filters=filters,
        store_root=store_root,
        images_root=images_root,
    )
