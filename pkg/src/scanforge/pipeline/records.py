"""Annotation state machine records and filter configuration.

An AnnotationRecord is the per-object row that moves through staging, the
three caption stages, style adaptation, consistency checking, and question
generation. Stage text fields are non-empty exactly when the status shows
that stage completed; eliminated records always carry a machine-readable
reason.
"""

from __future__ import annotations

from dataclasses import dataclass, field

STATUS_ORDER = (
    "pending",
    "staged",
    "s1_done",
    "s2_done",
    "s3_done",
    "s4_done",
    "s5_done",
    "final",
)

ELIMINATION_REASONS = ("unannotatable", "inconsistent", "category_filtered", "human_rejected")

VERIFY_STATUSES = ("pending", "llm_pass", "llm_fail", "human_pass", "human_fail")
EXPORTABLE_VERIFY = ("llm_pass", "human_pass")


@dataclass
class Question:
    text: str
    verify_status: str = "pending"

    def to_dict(self):
        return {"text": self.text, "verify_status": self.verify_status}

    @classmethod
    def from_dict(cls, doc):
        return cls(text=doc["text"], verify_status=doc["verify_status"])


@dataclass
class AnnotationRecord:
    scene_id: str
    instance_id: int
    category: str
    status: str = "pending"
    eliminated_reason: str | None = None
    best_frame_id: int | None = None
    context_frame_ids: list[int] = field(default_factory=list)
    context_fallback: bool = False
    image_paths: dict = field(default_factory=dict)
    object_caption: str = ""
    frame_caption: str = ""
    scene_caption: str = ""
    dense_referring_expression: str = ""
    scenario_questions: list[Question] = field(default_factory=list)
    zero_question_survivors: bool = False
    provenance: dict = field(default_factory=dict)

    # -- state machine -----------------------------------------------------------

    def stage_reached(self, status: str) -> bool:
        """True when this record completed `status` (eliminated counts what it had)."""
        if self.status == "eliminated":
            return False
        return STATUS_ORDER.index(self.status) >= STATUS_ORDER.index(status)

    def advance(self, status: str):
        if self.status == "eliminated":
            raise ValueError(f"{self.key()}: cannot advance an eliminated record")
        if STATUS_ORDER.index(status) <= STATUS_ORDER.index(self.status):
            raise ValueError(f"{self.key()}: cannot move {self.status} -> {status}")
        self.status = status

    def eliminate(self, reason: str):
        if reason not in ELIMINATION_REASONS:
            raise ValueError(f"unknown elimination reason {reason!r}")
        self.status = "eliminated"
        self.eliminated_reason = reason

    @property
    def terminal(self) -> bool:
        return self.status in ("final", "eliminated")

    def key(self) -> str:
        return f"{self.scene_id}:{self.instance_id}"

    def passing_questions(self) -> list[Question]:
        return [q for q in self.scenario_questions if q.verify_status in EXPORTABLE_VERIFY]

    # -- serialization ------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "scene_id": self.scene_id,
            "instance_id": self.instance_id,
            "category": self.category,
            "status": self.status,
            "eliminated_reason": self.eliminated_reason,
            "best_frame_id": self.best_frame_id,
            "context_frame_ids": list(self.context_frame_ids),
            "context_fallback": self.context_fallback,
            "image_paths": self.image_paths,
            "object_caption": self.object_caption,
            "frame_caption": self.frame_caption,
            "scene_caption": self.scene_caption,
            "dense_referring_expression": self.dense_referring_expression,
            "scenario_questions": [q.to_dict() for q in self.scenario_questions],
            "zero_question_survivors": self.zero_question_survivors,
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "AnnotationRecord":
        return cls(
            scene_id=doc["scene_id"],
            instance_id=int(doc["instance_id"]),
            category=doc["category"],
            status=doc["status"],
            eliminated_reason=doc.get("eliminated_reason"),
            best_frame_id=doc.get("best_frame_id"),
            context_frame_ids=[int(v) for v in doc.get("context_frame_ids", [])],
            context_fallback=bool(doc.get("context_fallback", False)),
            image_paths=doc.get("image_paths", {}),
            object_caption=doc.get("object_caption", ""),
            frame_caption=doc.get("frame_caption", ""),
            scene_caption=doc.get("scene_caption", ""),
            dense_referring_expression=doc.get("dense_referring_expression", ""),
            scenario_questions=[Question.from_dict(q) for q in doc.get("scenario_questions", [])],
            zero_question_survivors=bool(doc.get("zero_question_survivors", False)),
            provenance=doc.get("provenance", {}),
        )


@dataclass(frozen=True)
class FilterConfig:
    blocked_categories: frozenset = frozenset({"wall", "ceiling", "floor"})
    min_instances_per_category: int = 5

    def __post_init__(self):
        for cat in self.blocked_categories:
            if cat != cat.lower():
                raise ValueError(f"blocklist entries must be lowercase: {cat!r}")


def conservation_counts(records) -> dict:
    """Status tally; staged objects must end final or eliminated, nothing else."""
    counts = {"final": 0, "eliminated": 0, "in_flight": 0}
    reasons = {}
    for rec in records:
        if rec.status == "final":
            counts["final"] += 1
        elif rec.status == "eliminated":
            counts["eliminated"] += 1
            reasons[rec.eliminated_reason] = reasons.get(rec.eliminated_reason, 0) + 1
        else:
            counts["in_flight"] += 1
    counts["reasons"] = reasons
    counts["total"] = counts["final"] + counts["eliminated"] + counts["in_flight"]
    return counts
