"""Canonical dataset export.

Export lines are sorted by (scene_id, instance_id) and serialized with
sorted keys and no timestamps, so identical pipeline states produce
byte-identical files. Only final records export; only questions that passed
LLM or human verification ride along.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..evalbench import SegmentationSample, dump_samples
from .records import AnnotationRecord


def export_dict(rec: AnnotationRecord) -> dict:
    return {
        "scene_id": rec.scene_id,
        "instance_id": rec.instance_id,
        "category": rec.category,
        "dense_referring_expression": rec.dense_referring_expression,
        "scenario_questions": [q.text for q in rec.passing_questions()],
        "best_frame_id": rec.best_frame_id,
        "context_frame_ids": list(rec.context_frame_ids),
        "provenance": rec.provenance,
    }


def export_records(records: list[AnnotationRecord], out_path) -> int:
    """Write the dataset JSONL; returns the number of exported records."""
    final = sorted(
        (r for r in records if r.status == "final"),
        key=lambda r: (r.scene_id, r.instance_id),
    )
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with out_path.open("w", encoding="utf-8") as fh:
        for rec in final:
            fh.write(json.dumps(export_dict(rec), sort_keys=True, ensure_ascii=True) + "\n")
    return len(final)


def load_exported(path) -> list[dict]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            out.append(json.loads(line))
    return out


def export_benchmark(records: list[AnnotationRecord], scenes_by_id: dict, out_path) -> int:
    """Emit every exported question as a segmentation benchmark sample whose
    ground truth is the object's point indices."""
    samples = []
    final = sorted(
        (r for r in records if r.status == "final"),
        key=lambda r: (r.scene_id, r.instance_id),
    )
    for rec in final:
        scene = scenes_by_id.get(rec.scene_id)
        if scene is None:
            continue
        instance = scene.instance_by_id(rec.instance_id)
        for k, q in enumerate(rec.passing_questions()):
            samples.append(
                SegmentationSample(
                    sample_id=f"{rec.scene_id}:{rec.instance_id}:{k}",
                    scene_id=rec.scene_id,
                    question_text=q.text,
                    gt_point_indices=tuple(int(i) for i in instance.point_indices),
                    num_points=scene.num_points,
                )
            )
    dump_samples(samples, out_path)
    return len(samples)
