"""Per-object orchestration of the five annotation stages.

Each object runs strictly in order: staging, close-up caption, single-frame
caption, multi-frame scene caption plus style adaptation, consistency check,
question generation with verification. Every transition persists to the job
store before the next stage starts, so a killed run resumes at the last
persisted stage and, with the deterministic mock or a warm cache, reproduces
the uninterrupted result byte for byte.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

from ..corpus.records import ObjectInstance, SceneRecord
from ..errors import Unannotatable
from ..llm.gateway import ChatMessage, ChatRequest, Gateway, RetryPolicy
from ..llm.templates import render_prompt, template_hash
from ..staging import StagingParams, stage_object, write_staged_images
from .matching import load_synonyms, mask_category, normalize_for_match, parse_category_list
from .records import AnnotationRecord, Question
from .store import JobStore

log = logging.getLogger("scanforge.pipeline")


@dataclass
class PipelineConfig:
    mllm_backend: str = "mock"
    llm_backend: str = "mock"
    staging: StagingParams = field(default_factory=StagingParams)
    images_root: str = "staged"
    questions_per_object: int = 2
    caption_temperature: float = 0.2
    question_temperature: float = 0.7
    max_tokens: int = 512
    embed_category_hint: bool = False
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    synonyms_path: str | None = None

    def synonyms(self) -> dict[str, str]:
        return load_synonyms(self.synonyms_path)


def run_object(
    scene: SceneRecord,
    instance: ObjectInstance,
    cfg: PipelineConfig,
    store: JobStore,
    gateway: Gateway,
    stage_hook=None,
) -> AnnotationRecord:
    """Advance one object to a terminal state, resuming from the store."""
    rec = store.get(scene.scene_id, instance.instance_id)
    if rec is None:
        rec = AnnotationRecord(
            scene_id=scene.scene_id,
            instance_id=instance.instance_id,
            category=instance.category,
        )
    if rec.terminal:
        return rec

    def checkpoint(stage: str):
        store.persist(rec)
        if stage_hook is not None:
            stage_hook(stage, rec)

    if rec.status == "pending":
        try:
            staged = stage_object(scene, instance, cfg.staging)
        except Unannotatable as exc:
            log.info("%s eliminated before any backend call: %s", rec.key(), exc)
            rec.eliminate("unannotatable")
            checkpoint("eliminated")
            return rec
        rec.best_frame_id = staged.best_frame_id
        rec.context_frame_ids = [fid for fid, _ in staged.context]
        rec.context_fallback = staged.context_fallback
        rec.image_paths = write_staged_images(
            staged, cfg.images_root, scene.scene_id, instance.instance_id
        )
        rec.advance("staged")
        checkpoint("staged")

    if rec.status == "staged":
        rec.object_caption = _caption_stage(
            rec, cfg, gateway, "object_caption", {}, [_image(cfg, rec.image_paths["crop"])],
            provenance_key="s1",
        )
        rec.advance("s1_done")
        checkpoint("s1_done")

    if rec.status == "s1_done":
        rec.frame_caption = _caption_stage(
            rec, cfg, gateway, "frame_caption",
            {"object_caption": rec.object_caption},
            [_image(cfg, rec.image_paths["highlight"])],
            provenance_key="s2",
        )
        rec.advance("s2_done")
        checkpoint("s2_done")

    if rec.status == "s2_done":
        context_images = [_image(cfg, p) for p in rec.image_paths.get("context", [])]
        rec.scene_caption = _caption_stage(
            rec, cfg, gateway, "scene_caption",
            {"frame_caption": rec.frame_caption},
            context_images,
            provenance_key="s3",
        )
        rec.dense_referring_expression = _text_stage(
            rec, cfg, gateway, "style_adapt",
            {"scene_caption": rec.scene_caption},
            temperature=cfg.caption_temperature,
            provenance_key="s3b",
            hint=cfg.embed_category_hint,
        )
        rec.advance("s3_done")
        checkpoint("s3_done")

    if rec.status == "s3_done":
        if consistency_check(rec, cfg, gateway):
            rec.advance("s4_done")
            checkpoint("s4_done")
        else:
            rec.eliminate("inconsistent")
            checkpoint("eliminated")
            return rec

    if rec.status == "s4_done":
        inventory = [
            inst.category for inst in scene.instances if inst.instance_id != instance.instance_id
        ]
        generate_questions(rec, inventory, cfg, gateway)
        rec.advance("s5_done")
        checkpoint("s5_done")

    if rec.status == "s5_done":
        rec.advance("final")
        checkpoint("final")
    return rec


def annotate_scene(
    scene: SceneRecord,
    cfg: PipelineConfig,
    store: JobStore,
    gateway: Gateway,
    stage_hook=None,
) -> list[AnnotationRecord]:
    records = []
    for instance in sorted(scene.instances, key=lambda i: i.instance_id):
        records.append(run_object(scene, instance, cfg, store, gateway, stage_hook))
    return records


def consistency_check(rec: AnnotationRecord, cfg: PipelineConfig, gateway: Gateway) -> bool:
    """Ask the text backend what object the expression refers to, with the
    category word masked out; the prediction must match the ground truth."""
    masked = mask_category(rec.dense_referring_expression, rec.category)
    messages = render_prompt("identify_object", {"description": masked})
    request = ChatRequest(
        backend_id=cfg.llm_backend,
        messages=tuple(messages),
        temperature=0.0,
        max_tokens=32,
        template_id="identify_object",
        variables={"stage": "consistency"},
    )
    exchange = gateway.complete(request, cfg.retry)
    synonyms = cfg.synonyms()
    predicted = parse_category_list(exchange.response_text)
    rec.provenance["s4"] = {
        "template_id": "identify_object",
        "template_hash": template_hash("identify_object"),
        "request_hash": exchange.request_hash,
        "predicted": exchange.response_text.strip(),
    }
    if len(predicted) != 1:
        return False
    return normalize_for_match(predicted[0], synonyms) == normalize_for_match(
        rec.category, synonyms
    )


def generate_questions(
    rec: AnnotationRecord, scene_inventory: list[str], cfg: PipelineConfig, gateway: Gateway
):
    """Stage 5: draft scenario questions, then verify each one twice — a
    wellformedness pass and an identification pass that must resolve to the
    target category and to no other category present in the scene."""
    if cfg.questions_per_object <= 0:
        rec.scenario_questions = []
        rec.provenance["s5"] = {"skipped": "questions_per_object=0"}
        return

    inventory_text = _inventory_text(scene_inventory)
    messages = render_prompt(
        "gen_questions",
        {
            "expression": rec.dense_referring_expression,
            "inventory": inventory_text,
            "count": str(cfg.questions_per_object),
        },
    )
    request = ChatRequest(
        backend_id=cfg.llm_backend,
        messages=tuple(messages),
        temperature=cfg.question_temperature,
        max_tokens=cfg.max_tokens,
        template_id="gen_questions",
        variables={"count": str(cfg.questions_per_object)},
    )
    if cfg.embed_category_hint:
        request = request.with_hint(rec.category)
    exchange = gateway.complete(request, cfg.retry)
    candidates = _parse_question_lines(exchange.response_text)

    synonyms = cfg.synonyms()
    target = normalize_for_match(rec.category, synonyms)
    others = {normalize_for_match(c, synonyms) for c in scene_inventory} - {target}
    verify_hashes = []
    questions = []
    for text in candidates:
        status = "llm_pass"
        well_formed, h1 = _verify_wellformed(text, inventory_text, cfg, gateway)
        verify_hashes.append(h1)
        if not well_formed:
            status = "llm_fail"
        else:
            resolved, h2 = _identify(text, cfg, gateway)
            verify_hashes.append(h2)
            resolved_norm = {normalize_for_match(p, synonyms) for p in resolved}
            if target not in resolved_norm or resolved_norm & others:
                status = "llm_fail"
        questions.append(Question(text=text, verify_status=status))

    rec.scenario_questions = questions
    rec.zero_question_survivors = bool(questions) and not any(
        q.verify_status == "llm_pass" for q in questions
    )
    rec.provenance["s5"] = {
        "template_id": "gen_questions",
        "template_hash": template_hash("gen_questions"),
        "request_hash": exchange.request_hash,
        "verify_request_hashes": verify_hashes,
    }
    if rec.zero_question_survivors:
        log.warning("%s: all %d question candidates failed verification", rec.key(), len(questions))


# -- stage helpers ----------------------------------------------------------------


def _caption_stage(rec, cfg, gateway, template_id, variables, images, provenance_key):
    messages = render_prompt(template_id, variables)
    messages = [
        m if m.role != "user" else ChatMessage(role="user", text=m.text, images=tuple(images))
        for m in messages
    ]
    request = ChatRequest(
        backend_id=cfg.mllm_backend,
        messages=tuple(messages),
        temperature=cfg.caption_temperature,
        max_tokens=cfg.max_tokens,
        template_id=template_id,
        variables={},
    )
    if cfg.embed_category_hint:
        request = request.with_hint(rec.category)
    exchange = gateway.complete(request, cfg.retry)
    rec.provenance[provenance_key] = {
        "template_id": template_id,
        "template_hash": template_hash(template_id),
        "request_hash": exchange.request_hash,
    }
    return exchange.response_text.strip()


def _text_stage(rec, cfg, gateway, template_id, variables, temperature, provenance_key, hint):
    messages = render_prompt(template_id, variables)
    request = ChatRequest(
        backend_id=cfg.llm_backend,
        messages=tuple(messages),
        temperature=temperature,
        max_tokens=cfg.max_tokens,
        template_id=template_id,
        variables={},
    )
    if hint:
        request = request.with_hint(rec.category)
    exchange = gateway.complete(request, cfg.retry)
    rec.provenance[provenance_key] = {
        "template_id": template_id,
        "template_hash": template_hash(template_id),
        "request_hash": exchange.request_hash,
    }
    return exchange.response_text.strip()


def _verify_wellformed(question, inventory_text, cfg, gateway):
    messages = render_prompt("verify_question", {"question": question, "inventory": inventory_text})
    request = ChatRequest(
        backend_id=cfg.llm_backend,
        messages=tuple(messages),
        temperature=0.0,
        max_tokens=8,
        template_id="verify_question",
        variables={},
    )
    exchange = gateway.complete(request, cfg.retry)
    verdict = exchange.response_text.strip().lower()
    return verdict.startswith("consistent"), exchange.request_hash


def _identify(question, cfg, gateway):
    messages = render_prompt("identify_object", {"description": question})
    request = ChatRequest(
        backend_id=cfg.llm_backend,
        messages=tuple(messages),
        temperature=0.0,
        max_tokens=32,
        template_id="identify_object",
        variables={"stage": "question_verification"},
    )
    exchange = gateway.complete(request, cfg.retry)
    return parse_category_list(exchange.response_text), exchange.request_hash


def _inventory_text(categories: list[str]) -> str:
    counts = {}
    for cat in categories:
        counts[cat] = counts.get(cat, 0) + 1
    if not counts:
        return "none"
    return ", ".join(f"{cat} x{n}" for cat, n in sorted(counts.items()))


def _parse_question_lines(text: str) -> list[str]:
    import re

    out = []
    for line in text.splitlines():
        line = re.sub(r"^\s*\d+[.)]\s*", "", line.strip())
        if line:
            out.append(line)
    return out


def _image(cfg: PipelineConfig, rel_path: str) -> bytes:
    return (Path(cfg.images_root) / rel_path).read_bytes()
