"""In-memory corpus records: one reconstructed scan plus its posed frames.

All records are immutable once constructed and safe to share across workers.
Poses are camera-to-world. Depth images are 16-bit PNGs in millimeters with
0 meaning "no reading".
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import InvariantViolation, MissingFile, SchemaViolation

_WS = re.compile(r"\s+")

# PIL modes that decode to 16-bit integer samples.
_DEPTH_MODES = {"I", "I;16", "I;16B", "I;16L", "I;16N"}


def normalize_category(raw: str) -> str:
    """Lowercase, trim, collapse internal whitespace."""
    return _WS.sub(" ", raw.strip().lower())


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def validate(self):
        if self.fx <= 0 or self.fy <= 0:
            raise InvariantViolation(f"focal lengths must be positive: fx={self.fx}, fy={self.fy}")
        if not (0 <= self.cx < self.width):
            raise InvariantViolation(f"cx={self.cx} outside [0, {self.width})")
        if not (0 <= self.cy < self.height):
            raise InvariantViolation(f"cy={self.cy} outside [0, {self.height})")
        if self.width <= 0 or self.height <= 0:
            raise InvariantViolation("image dimensions must be positive")


@dataclass(frozen=True)
class FrameRecord:
    frame_id: int
    rgb_path: Path
    depth_path: Path
    intrinsics: CameraIntrinsics
    pose_c2w: np.ndarray  # 4x4 float64, row-major

    def validate(self, check_images: bool = True):
        self.intrinsics.validate()
        pose = np.asarray(self.pose_c2w, dtype=np.float64)
        if pose.shape != (4, 4):
            raise SchemaViolation(f"frame {self.frame_id}: pose_c2w must be 4x4")
        if np.abs(pose[3] - np.array([0.0, 0.0, 0.0, 1.0])).max() > 1e-6:
            raise InvariantViolation(f"frame {self.frame_id}: pose bottom row != (0,0,0,1)")
        rot = pose[:3, :3]
        if np.abs(rot @ rot.T - np.eye(3)).max() > 1e-4:
            raise InvariantViolation(f"frame {self.frame_id}: rotation block not orthonormal")
        if check_images:
            self._check_image_headers()

    def _check_image_headers(self):
        for label, path in (("rgb", self.rgb_path), ("depth", self.depth_path)):
            if not Path(path).exists():
                raise MissingFile(f"frame {self.frame_id}: {label} image missing: {path}")
        with Image.open(self.rgb_path) as img:
            if img.size != (self.intrinsics.width, self.intrinsics.height):
                raise SchemaViolation(
                    f"frame {self.frame_id}: rgb size {img.size} != intrinsics "
                    f"({self.intrinsics.width}, {self.intrinsics.height})"
                )
        with Image.open(self.depth_path) as img:
            if img.format != "PNG" or img.mode not in _DEPTH_MODES:
                raise SchemaViolation(
                    f"frame {self.frame_id}: depth bit depth must be 16-bit grayscale PNG, "
                    f"got format={img.format} mode={img.mode}"
                )
            if img.size != (self.intrinsics.width, self.intrinsics.height):
                raise SchemaViolation(
                    f"frame {self.frame_id}: depth size {img.size} != intrinsics "
                    f"({self.intrinsics.width}, {self.intrinsics.height})"
                )

    def load_rgb(self) -> np.ndarray:
        """(H, W, 3) uint8."""
        with Image.open(self.rgb_path) as img:
            return np.asarray(img.convert("RGB"), dtype=np.uint8)

    def load_depth_mm(self) -> np.ndarray:
        """(H, W) uint16 millimeters, 0 = invalid."""
        with Image.open(self.depth_path) as img:
            if img.mode not in _DEPTH_MODES:
                raise SchemaViolation(f"frame {self.frame_id}: depth bit depth ({img.mode})")
            return np.asarray(img, dtype=np.uint16)

    def world_to_camera(self) -> np.ndarray:
        return np.linalg.inv(np.asarray(self.pose_c2w, dtype=np.float64))


@dataclass(frozen=True)
class ObjectInstance:
    instance_id: int
    category: str
    point_indices: np.ndarray  # sorted unique int64

    def validate(self, num_points: int):
        if not self.category:
            raise InvariantViolation(f"instance {self.instance_id}: empty category")
        idx = np.asarray(self.point_indices)
        if idx.size == 0:
            raise InvariantViolation(f"instance {self.instance_id}: no points")
        if idx.min() < 0 or idx.max() >= num_points:
            raise InvariantViolation(
                f"instance {self.instance_id}: point index {int(idx.max())} out of range "
                f"for cloud of {num_points} points"
            )
        if np.unique(idx).size != idx.size:
            raise InvariantViolation(f"instance {self.instance_id}: duplicate point indices")


@dataclass(frozen=True)
class SceneRecord:
    scene_id: str
    points: np.ndarray  # (N, 3) float32 xyz, meters
    colors: np.ndarray  # (N, 3) uint8
    instances: tuple[ObjectInstance, ...]
    frames: tuple[FrameRecord, ...]
    superpoint_ids: np.ndarray | None = field(default=None)

    @property
    def num_points(self) -> int:
        return int(self.points.shape[0])

    def validate(self, check_images: bool = True):
        if self.points.ndim != 2 or self.points.shape[1] != 3 or self.num_points < 1:
            raise InvariantViolation(f"scene {self.scene_id}: points must be (N>=1, 3)")
        if self.colors.shape != self.points.shape:
            raise SchemaViolation(f"scene {self.scene_id}: colors shape != points shape")
        seen = np.zeros(self.num_points, dtype=bool)
        for inst in self.instances:
            inst.validate(self.num_points)
            idx = np.asarray(inst.point_indices)
            if seen[idx].any():
                raise InvariantViolation(
                    f"scene {self.scene_id}: instance {inst.instance_id} overlaps another instance"
                )
            seen[idx] = True
        ids = [inst.instance_id for inst in self.instances]
        if len(set(ids)) != len(ids):
            raise InvariantViolation(f"scene {self.scene_id}: duplicate instance ids")
        if self.superpoint_ids is not None and len(self.superpoint_ids) != self.num_points:
            raise SchemaViolation(f"scene {self.scene_id}: superpoint_ids length != point count")
        for frame in self.frames:
            frame.validate(check_images=check_images)

    def instance_by_id(self, instance_id: int) -> ObjectInstance:
        for inst in self.instances:
            if inst.instance_id == instance_id:
                return inst
        raise KeyError(f"scene {self.scene_id}: no instance {instance_id}")

    def category_inventory(self) -> list[str]:
        """Categories of all instances, one entry per instance."""
        return [inst.category for inst in self.instances]
