"""Scene-level train/val partitioning from explicit id list files."""

from __future__ import annotations

from pathlib import Path

from ..errors import SchemaViolation, UnassignedScene
from .records import AnnotationRecord


def read_scene_list(path) -> list[str]:
    path = Path(path)
    if not path.exists():
        raise SchemaViolation(f"no such scene list: {path}")
    ids = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            ids.append(line)
    return ids


def split_dataset(
    records: list[AnnotationRecord], train_list_path, val_list_path
) -> tuple[list[AnnotationRecord], list[AnnotationRecord]]:
    """Partition records by scene id. A record never straddles splits; a scene
    present in both lists or in neither is an error, not a guess."""
    train_ids = set(read_scene_list(train_list_path))
    val_ids = set(read_scene_list(val_list_path))
    both = train_ids & val_ids
    if both:
        raise SchemaViolation(f"scenes in both split lists: {sorted(both)[:5]}")
    train, val = [], []
    for rec in records:
        if rec.scene_id in train_ids:
            train.append(rec)
        elif rec.scene_id in val_ids:
            val.append(rec)
        else:
            raise UnassignedScene(f"scene {rec.scene_id!r} is in neither split list")
    return train, val
