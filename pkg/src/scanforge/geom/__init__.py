from .backend import active_backend, available_backends
from .core import (
    GeomParams,
    ObjectFrameStats,
    PointStatus,
    ProjectionResult,
    dump_frame_table_csv,
    object_frame_table,
    project_points,
    project_points_raw,
    rasterize_mask,
    visibility_test,
)

__all__ = [
    "active_backend",
    "available_backends",
    "GeomParams",
    "ObjectFrameStats",
    "PointStatus",
    "ProjectionResult",
    "dump_frame_table_csv",
    "object_frame_table",
    "project_points",
    "project_points_raw",
    "rasterize_mask",
    "visibility_test",
]
