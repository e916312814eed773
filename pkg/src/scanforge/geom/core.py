"""Projection, visibility, and mask rasterization over scan frames.

The per-point arithmetic lives in swappable kernel backends (compiled
extension or numpy reference, see __init__); this module owns the types,
validation, and frame iteration around them.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from ..corpus.records import FrameRecord, ObjectInstance, SceneRecord
from ..errors import DimensionMismatch
from . import backend


class PointStatus(IntEnum):
    VISIBLE = 0
    OCCLUDED = 1
    OUT_OF_FRAME = 2
    BEHIND_CAMERA = 3
    INVALID_DEPTH = 4


@dataclass(frozen=True)
class ProjectionResult:
    """Per-point pixel coordinates, camera depth, and status for one frame.

    After project_points a status of VISIBLE only means "in front of the
    camera and inside the image rectangle"; visibility_test refines it
    against the frame's depth image.
    """

    u: np.ndarray
    v: np.ndarray
    z_cam: np.ndarray
    status: np.ndarray
    width: int
    height: int

    def count(self, status: PointStatus) -> int:
        return int((self.status == int(status)).sum())


@dataclass(frozen=True)
class ObjectFrameStats:
    frame_id: int
    visible_point_count: int
    pixel_area: int
    mask: np.ndarray  # (H, W) uint8


@dataclass(frozen=True)
class GeomParams:
    tolerance_m: float = 0.05
    splat_radius: int = 2
    close_kernel: int = 5

    def validate(self):
        if self.tolerance_m < 0:
            raise ValueError("tolerance_m must be >= 0")
        if self.splat_radius < 0:
            raise ValueError("splat_radius must be >= 0")
        if self.close_kernel < 1 or self.close_kernel % 2 == 0:
            raise ValueError("close_kernel must be a positive odd pixel count")


def project_points_raw(points, pose_c2w, fx, fy, cx, cy, width, height) -> ProjectionResult:
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    w2c = np.linalg.inv(np.asarray(pose_c2w, dtype=np.float64))
    u, v, z, status = backend.kernels().project(pts, w2c, fx, fy, cx, cy, width, height)
    return ProjectionResult(u=u, v=v, z_cam=z, status=status, width=width, height=height)


def project_points(points, frame: FrameRecord) -> ProjectionResult:
    intr = frame.intrinsics
    intr.validate()
    return project_points_raw(
        points, frame.pose_c2w, intr.fx, intr.fy, intr.cx, intr.cy, intr.width, intr.height
    )


def visibility_test(proj: ProjectionResult, depth_mm, tolerance_m: float = 0.05) -> ProjectionResult:
    """Refine in-frame statuses against a millimeter depth image.

    Depth 0 marks a sensor hole (invalid_depth, not visible); a point more
    than tolerance_m behind the stored surface is occluded.
    """
    depth = np.asarray(depth_mm)
    if depth.shape != (proj.height, proj.width):
        raise DimensionMismatch(
            f"depth image is {depth.shape}, intrinsics say ({proj.height}, {proj.width})"
        )
    status = backend.kernels().depth_test(
        proj.u, proj.v, proj.z_cam, proj.status, depth.astype(np.uint16), float(tolerance_m)
    )
    return ProjectionResult(
        u=proj.u, v=proj.v, z_cam=proj.z_cam, status=status,
        width=proj.width, height=proj.height,
    )


def rasterize_mask(
    proj: ProjectionResult,
    splat_radius: int = 2,
    close_kernel: int = 5,
    frame_id: int = -1,
) -> ObjectFrameStats:
    """Splat visible points as filled discs, then close pinholes.

    pixel_area counts distinct set pixels after closing; points that are not
    VISIBLE contribute nothing.
    """
    GeomParams(splat_radius=splat_radius, close_kernel=close_kernel).validate()
    kern = backend.kernels()
    mask = kern.splat(proj.u, proj.v, proj.status, int(splat_radius), proj.height, proj.width)
    mask = kern.close(mask, int(close_kernel))
    return ObjectFrameStats(
        frame_id=frame_id,
        visible_point_count=proj.count(PointStatus.VISIBLE),
        pixel_area=int(mask.sum()),
        mask=mask,
    )


def object_frame_table(
    scene: SceneRecord, instance: ObjectInstance, params: GeomParams = GeomParams()
) -> list[ObjectFrameStats]:
    """Visibility and mask area of one instance in every frame, frame order."""
    params.validate()
    pts = scene.points[np.asarray(instance.point_indices)]
    table = []
    for frame in scene.frames:
        proj = project_points(pts, frame)
        proj = visibility_test(proj, frame.load_depth_mm(), params.tolerance_m)
        stats = rasterize_mask(
            proj, params.splat_radius, params.close_kernel, frame_id=frame.frame_id
        )
        table.append(stats)
    return table


def dump_frame_table_csv(table: list[ObjectFrameStats], path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("frame_id,visible_points,pixel_area\n")
        for row in table:
            fh.write(f"{row.frame_id},{row.visible_point_count},{row.pixel_area}\n")
