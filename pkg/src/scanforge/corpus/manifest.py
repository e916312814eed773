"""Scene manifest loading and validation.

One JSON document per scene:

    {
      "scene_id": str,
      "pose_convention": "c2w",
      "points": "<path>.ply",
      "instances": "<path>.json",
      "superpoints": "<path>.json",        # optional, passthrough
      "frames": [
        {"frame_id": int, "rgb": path, "depth": path,
         "intrinsics": {fx, fy, cx, cy, width, height},
         "pose_c2w": [16 numbers, row-major]}
      ]
    }

Relative paths resolve against the manifest's directory. The loader never
inverts poses: a manifest that does not declare pose_convention "c2w" is
rejected outright.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import MissingFile, SchemaViolation
from .ply import read_ply
from .records import CameraIntrinsics, FrameRecord, ObjectInstance, SceneRecord, normalize_category


def load_manifest(manifest_path) -> SceneRecord:
    """Load and fully validate one scene. Image pixels stay on disk."""
    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        raise MissingFile(f"no such manifest: {manifest_path}")
    root = manifest_path.parent
    try:
        doc = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"{manifest_path}: invalid JSON: {exc}") from exc

    scene_id = _require(doc, "scene_id", str, manifest_path)
    convention = _require(doc, "pose_convention", str, manifest_path)
    if convention != "c2w":
        raise SchemaViolation(
            f"{manifest_path}: pose_convention must be 'c2w', got {convention!r}"
        )

    points_path = root / _require(doc, "points", str, manifest_path)
    instances_path = root / _require(doc, "instances", str, manifest_path)
    points, colors = read_ply(points_path)

    instances = _load_instances(instances_path)

    superpoint_ids = None
    if doc.get("superpoints") is not None:
        sp_path = root / doc["superpoints"]
        if not sp_path.exists():
            raise MissingFile(f"{manifest_path}: superpoints file missing: {sp_path}")
        superpoint_ids = np.asarray(json.loads(sp_path.read_text(encoding="utf-8")), dtype=np.int64)

    frames = []
    raw_frames = doc.get("frames", [])
    if not isinstance(raw_frames, list):
        raise SchemaViolation(f"{manifest_path}: frames must be a list")
    for i, raw in enumerate(raw_frames):
        frames.append(_load_frame(raw, root, where=f"{manifest_path} frames[{i}]"))

    scene = SceneRecord(
        scene_id=scene_id,
        points=points,
        colors=colors,
        instances=tuple(instances),
        frames=tuple(frames),
        superpoint_ids=superpoint_ids,
    )
    scene.validate(check_images=True)
    return scene


def _load_instances(path: Path) -> list[ObjectInstance]:
    if not path.exists():
        raise MissingFile(f"instances file missing: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(raw, list):
        raise SchemaViolation(f"{path}: instances document must be a list")
    instances = []
    for i, obj in enumerate(raw):
        where = f"{path} instances[{i}]"
        instance_id = _require(obj, "instance_id", int, where)
        category = normalize_category(_require(obj, "category", str, where))
        idx = obj.get("point_indices")
        if not isinstance(idx, list):
            raise SchemaViolation(f"{where}: point_indices must be a list")
        indices = np.asarray(sorted(int(v) for v in idx), dtype=np.int64)
        instances.append(
            ObjectInstance(instance_id=instance_id, category=category, point_indices=indices)
        )
    return instances


def _load_frame(raw: dict, root: Path, where: str) -> FrameRecord:
    frame_id = _require(raw, "frame_id", int, where)
    rgb = root / _require(raw, "rgb", str, where)
    depth = root / _require(raw, "depth", str, where)
    intr_raw = _require(raw, "intrinsics", dict, where)
    try:
        intr = CameraIntrinsics(
            fx=float(intr_raw["fx"]),
            fy=float(intr_raw["fy"]),
            cx=float(intr_raw["cx"]),
            cy=float(intr_raw["cy"]),
            width=int(intr_raw["width"]),
            height=int(intr_raw["height"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaViolation(f"{where}: bad intrinsics: {exc}") from exc
    pose_raw = _require(raw, "pose_c2w", list, where)
    if len(pose_raw) != 16:
        raise SchemaViolation(f"{where}: pose_c2w must have 16 numbers, got {len(pose_raw)}")
    pose = np.asarray(pose_raw, dtype=np.float64).reshape(4, 4)
    return FrameRecord(
        frame_id=frame_id, rgb_path=rgb, depth_path=depth, intrinsics=intr, pose_c2w=pose
    )


def _require(obj, key, kind, where):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaViolation(f"{where}: missing field {key!r}")
    value = obj[key]
    if kind is int and isinstance(value, bool):
        raise SchemaViolation(f"{where}: field {key!r} must be {kind.__name__}")
    if not isinstance(value, kind):
        raise SchemaViolation(
            f"{where}: field {key!r} must be {kind.__name__}, got {type(value).__name__}"
        )
    return value
