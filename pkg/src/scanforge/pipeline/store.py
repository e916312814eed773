"""Resumable job store: append-only JSONL journal per scene plus a compacted
snapshot written by rename.

Every stage transition appends the full record state, so recovery is "read
snapshot, replay journal, last write wins". A torn final line from a crash
is ignored. Canonical record state contains no wall-clock timestamps; run
timing goes to a sidecar log, keeping stored bytes deterministic.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from .records import AnnotationRecord


class JobStore:
    def __init__(self, root):
        self.root = Path(root)
        self.journal_dir = self.root / "journal"
        self.snapshot_dir = self.root / "snapshots"
        self.journal_dir.mkdir(parents=True, exist_ok=True)
        self.snapshot_dir.mkdir(parents=True, exist_ok=True)
        self._scenes: dict[str, dict[int, AnnotationRecord]] = {}

    # -- paths ---------------------------------------------------------------

    def _journal_path(self, scene_id: str) -> Path:
        return self.journal_dir / f"{scene_id}.jsonl"

    def _snapshot_path(self, scene_id: str) -> Path:
        return self.snapshot_dir / f"{scene_id}.json"

    # -- reads -----------------------------------------------------------------

    def load_scene(self, scene_id: str) -> dict[int, AnnotationRecord]:
        if scene_id in self._scenes:
            return self._scenes[scene_id]
        records: dict[int, AnnotationRecord] = {}
        snap = self._snapshot_path(scene_id)
        if snap.exists():
            for doc in json.loads(snap.read_text(encoding="utf-8")):
                rec = AnnotationRecord.from_dict(doc)
                records[rec.instance_id] = rec
        journal = self._journal_path(scene_id)
        if journal.exists():
            for line in journal.read_text(encoding="utf-8").splitlines():
                line = line.strip()
                if not line:
                    continue
                try:
                    doc = json.loads(line)
                except json.JSONDecodeError:
                    continue  # torn tail from a crash
                rec = AnnotationRecord.from_dict(doc)
                records[rec.instance_id] = rec
        self._scenes[scene_id] = records
        return records

    def get(self, scene_id: str, instance_id: int) -> AnnotationRecord | None:
        return self.load_scene(scene_id).get(instance_id)

    def scene_ids(self) -> list[str]:
        ids = {p.stem for p in self.journal_dir.glob("*.jsonl")}
        ids.update(p.stem for p in self.snapshot_dir.glob("*.json"))
        return sorted(ids)

    def all_records(self) -> list[AnnotationRecord]:
        out = []
        for scene_id in self.scene_ids():
            scene = self.load_scene(scene_id)
            out.extend(scene[k] for k in sorted(scene))
        return out

    # -- writes -------------------------------------------------------------------

    def persist(self, record: AnnotationRecord):
        """Append the record's current state to its scene journal."""
        scene = self.load_scene(record.scene_id)
        scene[record.instance_id] = record
        line = json.dumps(record.to_dict(), sort_keys=True, ensure_ascii=True)
        with self._journal_path(record.scene_id).open("a", encoding="utf-8") as fh:
            fh.write(line + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def compact(self, scene_id: str):
        """Fold the journal into the snapshot (atomic rename), then drop it."""
        records = self.load_scene(scene_id)
        docs = [records[k].to_dict() for k in sorted(records)]
        snap = self._snapshot_path(scene_id)
        tmp = snap.with_suffix(".tmp")
        tmp.write_text(json.dumps(docs, sort_keys=True, ensure_ascii=True), encoding="utf-8")
        os.replace(tmp, snap)
        journal = self._journal_path(scene_id)
        if journal.exists():
            journal.unlink()
