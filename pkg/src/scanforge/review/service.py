"""HTTP service for the human QC loop.

Reviewers poll /tasks/next (tasks are leased for ten minutes so two
reviewers never hold the same open task), POST verdicts to /decisions, and
watch /progress. Decisions are journaled durably before the 201 goes out;
restarting the service replays the journal. Stage images are served
read-only from the images root, and a built review UI bundle can be mounted
at /.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from fastapi import FastAPI, HTTPException, Response
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, field_validator, model_validator

from ..errors import UnknownTask
from .sampling import ReviewTask

DEFAULT_LEASE_SECONDS = 600.0

VERDICTS = ("accept", "reject", "edit")


@dataclass
class ReviewDecision:
    task_id: str
    verdict: str
    reviewer_id: str
    edited_text: str | None = None
    decided_at: float = 0.0


class AlreadyDecided(Exception):
    """Another reviewer has already decided this task."""


class ReviewStore:
    """Single-writer task/decision state with lease bookkeeping."""

    def __init__(
        self,
        tasks: list[ReviewTask],
        journal_path=None,
        lease_seconds: float = DEFAULT_LEASE_SECONDS,
        clock=time.monotonic,
        wall_clock=time.time,
    ):
        self.tasks = {t.task_id: t for t in tasks}
        self.order = [t.task_id for t in tasks]
        self.journal_path = Path(journal_path) if journal_path else None
        self.lease_seconds = lease_seconds
        self.clock = clock
        self.wall_clock = wall_clock
        self._events: list[dict] = []
        self.decisions: dict[str, ReviewDecision] = {}
        self.leases: dict[str, tuple[str, float]] = {}
        self._lock = threading.Lock()
        if self.journal_path and self.journal_path.exists():
            for line in self.journal_path.read_text(encoding="utf-8").splitlines():
                line = line.strip()
                if not line:
                    continue
                try:
                    doc = json.loads(line)
                except json.JSONDecodeError:
                    continue
                self._events.append(doc)
                self._apply(ReviewDecision(**doc))

    def _apply(self, decision: ReviewDecision):
        self.decisions[decision.task_id] = decision
        if decision.task_id in self.tasks:
            self.tasks[decision.task_id].state = "decided"
        self.leases.pop(decision.task_id, None)

    def _write_journal(self):
        if self.journal_path is None:
            return
        self.journal_path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self.journal_path.with_suffix(".tmp")
        with tmp.open("w", encoding="utf-8") as fh:
            for event in self._events:
                fh.write(json.dumps(event, sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, self.journal_path)

    def next_task(self, reviewer_id: str) -> ReviewTask | None:
        with self._lock:
            now = self.clock()
            for task_id in self.order:
                if task_id in self.decisions:
                    continue
                lease = self.leases.get(task_id)
                if lease is not None and lease[0] != reviewer_id and lease[1] > now:
                    continue
                self.leases[task_id] = (reviewer_id, now + self.lease_seconds)
                return self.tasks[task_id]
            return None

    def decide(self, decision: ReviewDecision) -> ReviewDecision:
        """Record a decision durably. The same reviewer may overwrite their own
        decision (the journal keeps the full history); anyone else gets a
        conflict."""
        with self._lock:
            if decision.task_id not in self.tasks:
                raise UnknownTask(f"no such task {decision.task_id!r}")
            existing = self.decisions.get(decision.task_id)
            if existing is not None and existing.reviewer_id != decision.reviewer_id:
                raise AlreadyDecided(
                    f"task {decision.task_id!r} already decided by {existing.reviewer_id!r}"
                )
            decision.decided_at = self.wall_clock()
            self._events.append(asdict(decision))
            self._write_journal()
            self._apply(decision)
            return decision

    def progress(self) -> dict:
        with self._lock:
            decided = len(self.decisions)
            total = len(self.tasks)
            kept = sum(1 for d in self.decisions.values() if d.verdict in ("accept", "edit"))
            return {
                "open": total - decided,
                "decided": decided,
                "total": total,
                "accept_rate": (kept / decided) if decided else 0.0,
            }

    def all_decisions(self) -> list[ReviewDecision]:
        return list(self.decisions.values())


class DecisionIn(BaseModel):
    task_id: str
    verdict: str
    reviewer_id: str
    edited_text: str | None = None

    @field_validator("verdict")
    @classmethod
    def _known_verdict(cls, v):
        if v not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}")
        return v

    @model_validator(mode="after")
    def _edit_needs_text(self):
        if self.verdict == "edit" and not (self.edited_text or "").strip():
            raise ValueError("verdict 'edit' requires non-empty edited_text")
        return self


def create_app(store: ReviewStore, images_root=None, ui_dist=None) -> FastAPI:
    app = FastAPI(title="scanforge review service")
    app.state.store = store

    @app.get("/tasks/next")
    def tasks_next(reviewer: str = "anonymous"):
        task = store.next_task(reviewer)
        if task is None:
            return Response(status_code=204)
        return JSONResponse(task.to_dict())

    @app.post("/decisions", status_code=201)
    def post_decision(body: DecisionIn):
        decision = ReviewDecision(
            task_id=body.task_id,
            verdict=body.verdict,
            reviewer_id=body.reviewer_id,
            edited_text=body.edited_text,
        )
        try:
            saved = store.decide(decision)
        except UnknownTask as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except AlreadyDecided as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return asdict(saved)

    @app.get("/progress")
    def progress():
        return store.progress()

    if images_root is not None:
        images_root = Path(images_root).resolve()

        @app.get("/images/{rel_path:path}")
        def get_image(rel_path: str):
            full = (images_root / rel_path).resolve()
            if not str(full).startswith(str(images_root)) or not full.is_file():
                raise HTTPException(status_code=404, detail="no such image")
            return FileResponse(full, media_type="image/png")

    if ui_dist is not None and Path(ui_dist).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dist), html=True), name="ui")

    return app


def serve(store: ReviewStore, port: int, images_root=None, ui_dist=None, host="127.0.0.1"):
    import uvicorn

    app = create_app(store, images_root=images_root, ui_dist=ui_dist)
    uvicorn.run(app, host=host, port=port, log_level="info")
