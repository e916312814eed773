"""Synthetic scan generator: boxes and spheres on a floor, viewed from a
camera ring, with analytic depth rendered by ray casting.

Everything is deterministic for a fixed seed, down to the output bytes, so
pipeline tests can assert byte-identical reruns. The ray caster is also the
independent oracle for depth values and object silhouettes: the same
primitives that emit the point cloud produce the depth images, and tests can
re-cast rays against the saved geometry sidecar.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .ply import write_ply
from .records import CameraIntrinsics, FrameRecord, ObjectInstance, SceneRecord, normalize_category

_BASE_COLORS = np.array(
    [
        (204, 85, 60),
        (60, 130, 200),
        (90, 170, 90),
        (190, 160, 60),
        (150, 90, 180),
        (70, 180, 170),
        (200, 120, 160),
        (120, 120, 220),
    ],
    dtype=np.uint8,
)


@dataclass(frozen=True)
class Box:
    center: tuple[float, float, float]
    half: tuple[float, float, float]
    instance_idx: int | None = None

    def to_json(self):
        return {"kind": "box", "center": list(self.center), "half": list(self.half),
                "instance_idx": self.instance_idx}


@dataclass(frozen=True)
class Sphere:
    center: tuple[float, float, float]
    radius: float
    instance_idx: int | None = None

    def to_json(self):
        return {"kind": "sphere", "center": list(self.center), "radius": self.radius,
                "instance_idx": self.instance_idx}


@dataclass(frozen=True)
class Floor:
    half_extent: float
    instance_idx: int | None = None

    def to_json(self):
        return {"kind": "floor", "half_extent": self.half_extent, "instance_idx": None}


@dataclass
class SyntheticSpec:
    n_boxes: int = 2
    n_spheres: int = 1
    n_cameras: int = 8
    image_width: int = 192
    image_height: int = 144
    points_per_object: int = 900
    floor_points: int = 300
    cam_radius: float = 2.3
    cam_height: float = 1.3
    look_at: tuple[float, float, float] = (0.0, 0.0, 0.3)
    floor_half_extent: float = 3.0
    include_wall: bool = False
    categories: tuple[str, ...] = ("chair", "table", "lamp")


def camera_ring_pose(angle: float, radius: float, height: float, target) -> np.ndarray:
    """Camera-to-world pose for a camera on a ring, +z forward, +y down."""
    eye = np.array([radius * np.cos(angle), radius * np.sin(angle), height], dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    fwd = target - eye
    fwd = fwd / np.linalg.norm(fwd)
    up = np.array([0.0, 0.0, 1.0])
    right = np.cross(fwd, up)
    right = right / np.linalg.norm(right)
    down = np.cross(fwd, right)
    pose = np.eye(4, dtype=np.float64)
    pose[:3, 0] = right
    pose[:3, 1] = down
    pose[:3, 2] = fwd
    pose[:3, 3] = eye
    return pose


def raycast_frame(primitives, pose_c2w: np.ndarray, intr: CameraIntrinsics):
    """Cast one primary ray per pixel.

    Returns (depth_m, hit_idx): depth_m is camera-frame z of the nearest hit
    (0.0 where nothing is hit) and hit_idx the index into `primitives`
    (-1 where nothing is hit).
    """
    w, h = intr.width, intr.height
    xs = np.arange(w, dtype=np.float64)
    ys = np.arange(h, dtype=np.float64)
    gx, gy = np.meshgrid(xs, ys)
    # Unnormalized directions with dir_z = 1 make the ray parameter equal to
    # camera-frame depth.
    dirs_cam = np.stack(
        [(gx - intr.cx) / intr.fx, (gy - intr.cy) / intr.fy, np.ones_like(gx)], axis=-1
    ).reshape(-1, 3)
    rot = pose_c2w[:3, :3]
    origin = pose_c2w[:3, 3]
    dirs = dirs_cam @ rot.T

    best_t = np.full(dirs.shape[0], np.inf)
    best_idx = np.full(dirs.shape[0], -1, dtype=np.int32)
    for idx, prim in enumerate(primitives):
        t = _intersect(prim, origin, dirs)
        closer = t < best_t
        best_t[closer] = t[closer]
        best_idx[closer] = idx

    depth = np.where(np.isfinite(best_t), best_t, 0.0).reshape(h, w)
    return depth, best_idx.reshape(h, w)


def _intersect(prim, origin, dirs):
    eps = 1e-9
    if isinstance(prim, Floor):
        dz = dirs[:, 2]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(np.abs(dz) > eps, -origin[2] / dz, np.inf)
        pt = origin[None, :2] + t[:, None] * dirs[:, :2]
        inside = (np.abs(pt) <= prim.half_extent).all(axis=1)
        return np.where((t > eps) & inside, t, np.inf)
    if isinstance(prim, Sphere):
        oc = origin - np.asarray(prim.center)
        a = (dirs * dirs).sum(axis=1)
        b = 2.0 * (dirs * oc).sum(axis=1)
        c = float(oc @ oc) - prim.radius**2
        disc = b * b - 4.0 * a * c
        hit = disc >= 0.0
        sq = np.sqrt(np.where(hit, disc, 0.0))
        t0 = (-b - sq) / (2.0 * a)
        t1 = (-b + sq) / (2.0 * a)
        t = np.where(t0 > eps, t0, t1)
        return np.where(hit & (t > eps), t, np.inf)
    if isinstance(prim, Box):
        lo = np.asarray(prim.center) - np.asarray(prim.half)
        hi = np.asarray(prim.center) + np.asarray(prim.half)
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / dirs
        t1 = (lo[None, :] - origin[None, :]) * inv
        t2 = (hi[None, :] - origin[None, :]) * inv
        tmin = np.minimum(t1, t2).max(axis=1)
        tmax = np.maximum(t1, t2).min(axis=1)
        hit = (tmax >= tmin) & (tmax > eps)
        t = np.where(tmin > eps, tmin, tmax)
        return np.where(hit & (t > eps), t, np.inf)
    raise TypeError(f"unknown primitive {type(prim).__name__}")


def _sample_box_surface(rng, box: Box, count: int) -> np.ndarray:
    hx, hy, hz = box.half
    # (axis, sign) faces weighted by area
    faces = [(0, 1), (0, -1), (1, 1), (1, -1), (2, 1), (2, -1)]
    areas = np.array([hy * hz, hy * hz, hx * hz, hx * hz, hx * hy, hx * hy], dtype=np.float64)
    probs = areas / areas.sum()
    choice = rng.choice(len(faces), size=count, p=probs)
    uv = rng.uniform(-1.0, 1.0, size=(count, 2))
    pts = np.empty((count, 3), dtype=np.float64)
    half = np.array(box.half)
    for i, (axis, sign) in enumerate(faces):
        sel = choice == i
        if not sel.any():
            continue
        other = [a for a in range(3) if a != axis]
        pts[sel, axis] = sign * half[axis]
        pts[sel, other[0]] = uv[sel, 0] * half[other[0]]
        pts[sel, other[1]] = uv[sel, 1] * half[other[1]]
    return pts + np.asarray(box.center)[None, :]


def _sample_sphere_surface(rng, sphere: Sphere, count: int) -> np.ndarray:
    vec = rng.normal(size=(count, 3))
    vec /= np.linalg.norm(vec, axis=1, keepdims=True)
    return np.asarray(sphere.center)[None, :] + sphere.radius * vec


def _sample_floor(rng, floor: Floor, count: int) -> np.ndarray:
    xy = rng.uniform(-floor.half_extent * 0.45, floor.half_extent * 0.45, size=(count, 2))
    return np.concatenate([xy, np.zeros((count, 1))], axis=1)


def _place_objects(rng, spec: SyntheticSpec):
    """Objects on a jittered ring of slots so they never interpenetrate."""
    prims = []
    n = spec.n_boxes + spec.n_spheres
    for k in range(n):
        angle = 2.0 * np.pi * k / max(n, 1) + rng.uniform(-0.15, 0.15)
        dist = rng.uniform(0.55, 0.85)
        cx, cy = dist * np.cos(angle), dist * np.sin(angle)
        if k < spec.n_boxes:
            half = tuple(rng.uniform(0.16, 0.27, size=3))
            prims.append(Box(center=(cx, cy, half[2]), half=half, instance_idx=k))
        else:
            radius = float(rng.uniform(0.18, 0.26))
            prims.append(Sphere(center=(cx, cy, radius), radius=radius, instance_idx=k))
    return prims


def generate_synthetic_scene(seed: int, spec: SyntheticSpec, out_dir) -> tuple[SceneRecord, Path]:
    """Write a complete scene (manifest, PLY, PNGs, geometry sidecar).

    Returns the in-memory record and the manifest path. Output bytes are a
    pure function of (seed, spec).
    """
    rng = np.random.default_rng(seed)
    scene_id = f"synth_{seed:04d}"
    scene_dir = Path(out_dir) / scene_id
    frames_dir = scene_dir / "frames"
    frames_dir.mkdir(parents=True, exist_ok=True)

    objects = _place_objects(rng, spec)
    if spec.include_wall:
        objects.append(
            Box(center=(-1.5, 0.0, 0.75), half=(0.03, 1.6, 0.75), instance_idx=len(objects))
        )
    floor = Floor(half_extent=spec.floor_half_extent)
    primitives = objects + [floor]

    # --- point cloud ---------------------------------------------------------
    clouds = [_sample_floor(rng, floor, spec.floor_points)]
    colors = [np.full((spec.floor_points, 3), 110, dtype=np.uint8)]
    instances = []
    cursor = spec.floor_points
    categories = []
    for i, prim in enumerate(objects):
        if isinstance(prim, Box) and spec.include_wall and i == len(objects) - 1:
            category = "wall"
        else:
            category = spec.categories[i % len(spec.categories)]
        categories.append(category)
        pts = (
            _sample_box_surface(rng, prim, spec.points_per_object)
            if isinstance(prim, Box)
            else _sample_sphere_surface(rng, prim, spec.points_per_object)
        )
        clouds.append(pts)
        colors.append(np.tile(_BASE_COLORS[i % len(_BASE_COLORS)], (len(pts), 1)))
        instances.append(
            ObjectInstance(
                instance_id=i,
                category=normalize_category(category),
                point_indices=np.arange(cursor, cursor + len(pts), dtype=np.int64),
            )
        )
        cursor += len(pts)
    points = np.concatenate(clouds, axis=0).astype(np.float32)
    point_colors = np.concatenate(colors, axis=0)

    # --- frames ---------------------------------------------------------------
    intr = CameraIntrinsics(
        fx=spec.image_width * 1.0,
        fy=spec.image_width * 1.0,
        cx=spec.image_width / 2.0,
        cy=spec.image_height / 2.0,
        width=spec.image_width,
        height=spec.image_height,
    )
    frames = []
    frame_docs = []
    for k in range(spec.n_cameras):
        angle = 2.0 * np.pi * k / spec.n_cameras
        pose = camera_ring_pose(angle, spec.cam_radius, spec.cam_height, spec.look_at)
        depth_m, hit_idx = raycast_frame(primitives, pose, intr)

        rgb = _shade(depth_m, hit_idx, objects)
        rgb_rel = f"frames/rgb_{k:03d}.png"
        depth_rel = f"frames/depth_{k:03d}.png"
        Image.fromarray(rgb).save(scene_dir / rgb_rel, format="PNG")
        depth_mm = np.clip(np.round(depth_m * 1000.0), 0, 65535).astype(np.uint16)
        Image.fromarray(depth_mm).save(scene_dir / depth_rel, format="PNG")

        frames.append(
            FrameRecord(
                frame_id=k,
                rgb_path=scene_dir / rgb_rel,
                depth_path=scene_dir / depth_rel,
                intrinsics=intr,
                pose_c2w=pose,
            )
        )
        frame_docs.append(
            {
                "frame_id": k,
                "rgb": rgb_rel,
                "depth": depth_rel,
                "intrinsics": {
                    "fx": intr.fx, "fy": intr.fy, "cx": intr.cx, "cy": intr.cy,
                    "width": intr.width, "height": intr.height,
                },
                "pose_c2w": [float(v) for v in pose.reshape(-1)],
            }
        )

    # --- documents --------------------------------------------------------------
    write_ply(scene_dir / "points.ply", points, point_colors)
    (scene_dir / "instances.json").write_text(
        json.dumps(
            [
                {
                    "instance_id": inst.instance_id,
                    "category": inst.category,
                    "point_indices": [int(v) for v in inst.point_indices],
                }
                for inst in instances
            ],
            indent=2,
            sort_keys=True,
        ),
        encoding="utf-8",
    )
    manifest = {
        "scene_id": scene_id,
        "pose_convention": "c2w",
        "points": "points.ply",
        "instances": "instances.json",
        "frames": frame_docs,
    }
    manifest_path = scene_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8")
    (scene_dir / "geometry.json").write_text(
        json.dumps([p.to_json() for p in primitives], indent=2, sort_keys=True), encoding="utf-8"
    )

    record = SceneRecord(
        scene_id=scene_id,
        points=points,
        colors=point_colors,
        instances=tuple(instances),
        frames=tuple(frames),
    )
    record.validate(check_images=True)
    return record, manifest_path


def _shade(depth_m, hit_idx, objects):
    h, w = depth_m.shape
    rgb = np.full((h, w, 3), 28, dtype=np.uint8)
    floor_idx = len(objects)
    floor_sel = hit_idx == floor_idx
    rgb[floor_sel] = (96, 96, 96)
    for i in range(len(objects)):
        sel = hit_idx == i
        if not sel.any():
            continue
        base = _BASE_COLORS[i % len(_BASE_COLORS)].astype(np.float64)
        fade = 1.0 / (1.0 + 0.12 * depth_m[sel, None])
        rgb[sel] = np.clip(base[None, :] * fade, 0, 255).astype(np.uint8)
    return rgb


def load_geometry(scene_dir) -> list:
    """Reload the primitive sidecar written by generate_synthetic_scene."""
    raw = json.loads((Path(scene_dir) / "geometry.json").read_text(encoding="utf-8"))
    prims = []
    for obj in raw:
        if obj["kind"] == "box":
            prims.append(Box(tuple(obj["center"]), tuple(obj["half"]), obj["instance_idx"]))
        elif obj["kind"] == "sphere":
            prims.append(Sphere(tuple(obj["center"]), obj["radius"], obj["instance_idx"]))
        elif obj["kind"] == "floor":
            prims.append(Floor(obj["half_extent"]))
        else:
            raise ValueError(f"unknown primitive kind {obj['kind']!r}")
    return prims


def generate_corpus(out_dir, n_scenes: int, base_seed: int, spec: SyntheticSpec | None = None):
    """Generate several scenes; returns the manifest paths in scene order."""
    spec = spec or SyntheticSpec()
    paths = []
    for i in range(n_scenes):
        _, manifest = generate_synthetic_scene(base_seed + i, spec, out_dir)
        paths.append(manifest)
    return paths
