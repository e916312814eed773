"""Frame selection and the three image stimuli fed to caption backends:
a cropped masked object, a single-frame contour highlight, and up to eight
highlighted context frames sampled across the video.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .corpus.records import ObjectInstance, SceneRecord
from .errors import DimensionMismatch, EmptyMask, Unannotatable
from .geom import GeomParams, ObjectFrameStats, object_frame_table

HIGHLIGHT_RGB = (255, 255, 0)  # yellow contour


@dataclass(frozen=True)
class StagingParams:
    min_area: int = 50
    context_count: int = 8
    margin_frac: float = 0.1
    contour_thickness: int = 3
    geom: GeomParams = field(default_factory=GeomParams)


@dataclass(frozen=True)
class StagedImages:
    best_frame_id: int
    crop_image: np.ndarray
    highlight_image: np.ndarray
    context: tuple[tuple[int, np.ndarray], ...]  # (frame_id, highlighted rgb)
    context_fallback: bool  # fewer eligible frames than requested


def select_best_frame(table: list[ObjectFrameStats], min_area: int) -> int:
    """Frame with the largest mask area; ties break to the lowest frame id."""
    if not table:
        raise Unannotatable("empty frame table")
    best = max(table, key=lambda s: (s.pixel_area, -s.frame_id))
    if best.pixel_area < min_area:
        raise Unannotatable(
            f"object never reaches min_area={min_area} px (best {best.pixel_area})"
        )
    return best.frame_id


def sample_context_frames(
    table: list[ObjectFrameStats], count: int = 8, min_area: int = 50
) -> tuple[list[int], bool]:
    """Evenly sample frame ids from the frames where the object is visible.

    Returns (frame_ids, fallback): when fewer than `count` frames are
    eligible, all of them are returned and fallback is True.
    """
    eligible = [s.frame_id for s in table if s.pixel_area >= min_area]
    n = len(eligible)
    if n == 0:
        raise Unannotatable(f"no frame reaches min_area={min_area} px")
    if n < count:
        return list(eligible), True
    if count == 1:
        return [eligible[0]], False
    picks = []
    for i in range(count):
        idx = int(math.floor(i * (n - 1) / (count - 1) + 0.5))
        if not picks or eligible[idx] != picks[-1]:
            picks.append(eligible[idx])
    return picks, False


def render_crop(rgb_image: np.ndarray, mask: np.ndarray, margin_frac: float = 0.1) -> np.ndarray:
    """Black out non-object pixels and crop to the padded mask bounding box."""
    _check_mask(rgb_image, mask)
    ys, xs = np.nonzero(mask)
    if ys.size == 0:
        raise EmptyMask("render_crop: mask has no set pixels")
    y0, y1 = int(ys.min()), int(ys.max())
    x0, x1 = int(xs.min()), int(xs.max())
    mx = int(math.floor(margin_frac * (x1 - x0 + 1)))
    my = int(math.floor(margin_frac * (y1 - y0 + 1)))
    h, w = mask.shape
    y0, y1 = max(0, y0 - my), min(h - 1, y1 + my)
    x0, x1 = max(0, x0 - mx), min(w - 1, x1 + mx)
    out = np.where(mask[:, :, None] != 0, rgb_image, 0).astype(np.uint8)
    return out[y0 : y1 + 1, x0 : x1 + 1].copy()


def render_highlight(
    rgb_image: np.ndarray,
    mask: np.ndarray,
    color_rgb=HIGHLIGHT_RGB,
    thickness: int = 3,
) -> np.ndarray:
    """Paint the mask boundary (set pixels with an unset or out-of-image
    4-neighbor), thickened to `thickness` pixels. thickness 0 is a no-op."""
    _check_mask(rgb_image, mask)
    if not mask.any():
        raise EmptyMask("render_highlight: mask has no set pixels")
    out = rgb_image.copy()
    if thickness <= 0:
        return out
    m = mask != 0
    padded = np.pad(m, 1, constant_values=False)
    interior = (
        padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
    )
    boundary = m & ~interior
    r = thickness // 2
    if r > 0:
        ys, xs = np.nonzero(boundary)
        h, w = m.shape
        painted = np.zeros_like(m)
        for dy in range(-r, r + 1):
            for dx in range(-r, r + 1):
                if dx * dx + dy * dy > r * r:
                    continue
                y2 = ys + dy
                x2 = xs + dx
                ok = (y2 >= 0) & (y2 < h) & (x2 >= 0) & (x2 < w)
                painted[y2[ok], x2[ok]] = True
        boundary = painted
    out[boundary] = color_rgb
    return out


def stage_object(
    scene: SceneRecord, instance: ObjectInstance, params: StagingParams = StagingParams()
) -> StagedImages:
    """Run the full staging for one object.

    Raises Unannotatable before any image rendering when the object is never
    adequately seen, so callers can eliminate it without side effects.
    """
    table = object_frame_table(scene, instance, params.geom)
    best_id = select_best_frame(table, params.min_area)
    ctx_ids, fallback = sample_context_frames(table, params.context_count, params.min_area)

    by_id = {s.frame_id: s for s in table}
    frames = {f.frame_id: f for f in scene.frames}
    best_rgb = frames[best_id].load_rgb()
    best_mask = by_id[best_id].mask
    crop = render_crop(best_rgb, best_mask, params.margin_frac)
    highlight = render_highlight(best_rgb, best_mask, HIGHLIGHT_RGB, params.contour_thickness)
    context = []
    for fid in ctx_ids:
        rgb = best_rgb if fid == best_id else frames[fid].load_rgb()
        context.append(
            (fid, render_highlight(rgb, by_id[fid].mask, HIGHLIGHT_RGB, params.contour_thickness))
        )
    return StagedImages(
        best_frame_id=best_id,
        crop_image=crop,
        highlight_image=highlight,
        context=tuple(context),
        context_fallback=fallback,
    )


def write_staged_images(staged: StagedImages, out_root, scene_id: str, instance_id: int) -> dict:
    """Write crop/highlight/context PNGs; returns relative paths keyed by role."""
    rel_dir = Path(scene_id) / str(instance_id)
    out_dir = Path(out_root) / rel_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {}
    Image.fromarray(staged.crop_image, mode="RGB").save(out_dir / "crop.png", format="PNG")
    paths["crop"] = str(rel_dir / "crop.png")
    Image.fromarray(staged.highlight_image, mode="RGB").save(
        out_dir / "highlight.png", format="PNG"
    )
    paths["highlight"] = str(rel_dir / "highlight.png")
    ctx_paths = []
    for k, (fid, img) in enumerate(staged.context):
        name = f"ctx_{k}.png"
        Image.fromarray(img, mode="RGB").save(out_dir / name, format="PNG")
        ctx_paths.append(str(rel_dir / name))
    paths["context"] = ctx_paths
    return paths


def _check_mask(rgb_image: np.ndarray, mask: np.ndarray):
    if mask.shape != rgb_image.shape[:2]:
        raise DimensionMismatch(
            f"mask shape {mask.shape} does not match image {rgb_image.shape[:2]}"
        )
