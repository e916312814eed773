"""Pure-numpy geometry kernels.

This is the fallback when the compiled extension is unavailable and the
reference the extension is tested against. Arithmetic is written with the
same operation order as the C loops so results match bit-for-bit.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

VISIBLE = 0
OCCLUDED = 1
OUT_OF_FRAME = 2
BEHIND_CAMERA = 3
INVALID_DEPTH = 4

_MIN_Z = 1e-6


def project(points, w2c, fx, fy, cx, cy, width, height):
    pts = np.ascontiguousarray(points, dtype=np.float64)
    m = np.ascontiguousarray(w2c, dtype=np.float64)
    x_w, y_w, z_w = pts[:, 0], pts[:, 1], pts[:, 2]
    x = m[0, 0] * x_w + m[0, 1] * y_w + m[0, 2] * z_w + m[0, 3]
    y = m[1, 0] * x_w + m[1, 1] * y_w + m[1, 2] * z_w + m[1, 3]
    z = m[2, 0] * x_w + m[2, 1] * y_w + m[2, 2] * z_w + m[2, 3]

    behind = z <= _MIN_Z
    safe_z = np.where(behind, 1.0, z)
    u = np.where(behind, 0.0, fx * x / safe_z + cx)
    v = np.where(behind, 0.0, fy * y / safe_z + cy)

    in_rect = (u >= 0.0) & (u < width) & (v >= 0.0) & (v < height) & ~behind
    status = np.full(pts.shape[0], OUT_OF_FRAME, dtype=np.uint8)
    status[behind] = BEHIND_CAMERA
    status[in_rect] = VISIBLE
    return u, v, z, status


def depth_test(u, v, z, status, depth_mm, tolerance_m):
    h, w = depth_mm.shape
    out = status.copy()
    sel = status == VISIBLE
    if not sel.any():
        return out
    px = np.clip(np.floor(u[sel] + 0.5).astype(np.int64), 0, w - 1)
    py = np.clip(np.floor(v[sel] + 0.5).astype(np.int64), 0, h - 1)
    d = depth_mm[py, px]
    invalid = d == 0
    occluded = ~invalid & (z[sel] - d / 1000.0 > tolerance_m)
    new = np.full(sel.sum(), VISIBLE, dtype=np.uint8)
    new[invalid] = INVALID_DEPTH
    new[occluded] = OCCLUDED
    out[sel] = new
    return out


def splat(u, v, status, radius, height, width):
    mask = np.zeros((height, width), dtype=np.uint8)
    sel = status == VISIBLE
    if not sel.any():
        return mask
    px = np.clip(np.floor(u[sel] + 0.5).astype(np.int64), 0, width - 1)
    py = np.clip(np.floor(v[sel] + 0.5).astype(np.int64), 0, height - 1)
    r = int(radius)
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            if dx * dx + dy * dy > r * r:
                continue
            xs = px + dx
            ys = py + dy
            ok = (xs >= 0) & (xs < width) & (ys >= 0) & (ys < height)
            mask[ys[ok], xs[ok]] = 1
    return mask


def close(mask, kernel):
    k = int(kernel)
    if k <= 1:
        return mask.copy()
    structure = np.ones((k, k), dtype=bool)
    # Dilation treats outside as empty; erosion treats it as filled so the
    # closing never eats mask pixels at the image border.
    dil = ndimage.binary_dilation(mask.astype(bool), structure=structure, border_value=0)
    ero = ndimage.binary_erosion(dil, structure=structure, border_value=1)
    return ero.astype(np.uint8)
