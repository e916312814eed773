"""Fold human review decisions back into annotation records before export."""

from __future__ import annotations

from ..errors import UnknownTask
from ..pipeline.records import AnnotationRecord
from .service import ReviewDecision


def apply_decisions(
    records: list[AnnotationRecord], decisions: list[ReviewDecision]
) -> list[AnnotationRecord]:
    """accept -> human_pass, reject -> human_fail (excluded from export),
    edit -> text replaced and human_pass. Unreviewed questions keep llm_pass."""
    by_key = {rec.key(): rec for rec in records}
    for decision in decisions:
        try:
            scene_id, instance_id, qidx = decision.task_id.rsplit(":", 2)
            instance_id, qidx = int(instance_id), int(qidx)
        except ValueError as exc:
            raise UnknownTask(f"malformed task id {decision.task_id!r}") from exc
        rec = by_key.get(f"{scene_id}:{instance_id}")
        if rec is None or qidx >= len(rec.scenario_questions):
            raise UnknownTask(f"decision references unknown question {decision.task_id!r}")
        question = rec.scenario_questions[qidx]
        if decision.verdict == "accept":
            question.verify_status = "human_pass"
        elif decision.verdict == "reject":
            question.verify_status = "human_fail"
        elif decision.verdict == "edit":
            question.text = decision.edited_text or question.text
            question.verify_status = "human_pass"
            rec.provenance.setdefault("human_edited_questions", []).append(decision.task_id)
        else:
            raise UnknownTask(f"unknown verdict {decision.verdict!r}")
    return records
