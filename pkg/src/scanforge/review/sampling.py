"""Seeded, category-stratified sampling of verified questions for human QC."""

from __future__ import annotations

import json
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from ..pipeline.records import AnnotationRecord


@dataclass
class ReviewTask:
    task_id: str
    scene_id: str
    instance_id: int
    category: str
    question_text: str
    dense_referring_expression: str
    image_paths: dict = field(default_factory=dict)
    state: str = "open"

    def to_dict(self):
        return {
            "task_id": self.task_id,
            "scene_id": self.scene_id,
            "instance_id": self.instance_id,
            "category": self.category,
            "question_text": self.question_text,
            "dense_referring_expression": self.dense_referring_expression,
            "image_paths": self.image_paths,
            "state": self.state,
        }

    @classmethod
    def from_dict(cls, doc):
        return cls(
            task_id=doc["task_id"],
            scene_id=doc["scene_id"],
            instance_id=int(doc["instance_id"]),
            category=doc.get("category", ""),
            question_text=doc["question_text"],
            dense_referring_expression=doc.get("dense_referring_expression", ""),
            image_paths=doc.get("image_paths", {}),
            state=doc.get("state", "open"),
        )


def task_id_for(scene_id: str, instance_id: int, question_index: int) -> str:
    return f"{scene_id}:{instance_id}:{question_index}"


def sample_review_set(
    records: list[AnnotationRecord], rate: float, seed: int
) -> list[ReviewTask]:
    """Pick ceil(rate * n) of the llm_pass questions, stratified by category
    so no category exceeds twice its proportional share of the sample."""
    if not 0 < rate <= 1:
        raise ValueError(f"rate must be in (0, 1], got {rate}")
    pool = []
    for rec in sorted(records, key=lambda r: (r.scene_id, r.instance_id)):
        if rec.status != "final":
            continue
        for qidx, q in enumerate(rec.scenario_questions):
            if q.verify_status == "llm_pass":
                pool.append((rec, qidx, q))
    n = len(pool)
    if n == 0:
        return []
    k = math.ceil(rate * n)
    per_cat = Counter(rec.category for rec, _, _ in pool)
    caps = {cat: math.ceil(2.0 * k * cnt / n) for cat, cnt in per_cat.items()}

    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    taken: list[int] = []
    counts: Counter = Counter()
    skipped = []
    for idx in order:
        if len(taken) == k:
            break
        cat = pool[idx][0].category
        if counts[cat] >= caps[cat]:
            skipped.append(idx)
            continue
        counts[cat] += 1
        taken.append(idx)
    # caps can strand the tail in tiny skewed pools; keep the sample size exact
    for idx in skipped:
        if len(taken) == k:
            break
        taken.append(idx)

    tasks = []
    for idx in sorted(taken):
        rec, qidx, q = pool[idx]
        tasks.append(
            ReviewTask(
                task_id=task_id_for(rec.scene_id, rec.instance_id, qidx),
                scene_id=rec.scene_id,
                instance_id=rec.instance_id,
                category=rec.category,
                question_text=q.text,
                dense_referring_expression=rec.dense_referring_expression,
                image_paths=rec.image_paths,
            )
        )
    return tasks


def dump_tasks(tasks: list[ReviewTask], path):
    with Path(path).open("w", encoding="utf-8") as fh:
        for t in tasks:
            fh.write(json.dumps(t.to_dict(), sort_keys=True) + "\n")


def load_tasks(path) -> list[ReviewTask]:
    tasks = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            tasks.append(ReviewTask.from_dict(json.loads(line)))
    return tasks
