from .records import CameraIntrinsics, FrameRecord, ObjectInstance, SceneRecord, normalize_category
from .manifest import load_manifest
from .ply import read_ply, write_ply
from .synthetic import SyntheticSpec, generate_synthetic_scene, generate_corpus, raycast_frame

__all__ = [
    "CameraIntrinsics",
    "FrameRecord",
    "ObjectInstance",
    "SceneRecord",
    "normalize_category",
    "load_manifest",
    "read_ply",
    "write_ply",
    "SyntheticSpec",
    "generate_synthetic_scene",
    "generate_corpus",
    "raycast_frame",
]
