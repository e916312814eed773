# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled geometry kernels: pinhole projection, depth-test visibility,
disc splatting, and binary closing. Semantics mirror _reference.py exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport floor

cnp.import_array()

cdef unsigned char VISIBLE = 0
cdef unsigned char OCCLUDED = 1
cdef unsigned char OUT_OF_FRAME = 2
cdef unsigned char BEHIND_CAMERA = 3
cdef unsigned char INVALID_DEPTH = 4

cdef double MIN_Z = 1e-6


def project(points, w2c, double fx, double fy, double cx, double cy,
            int width, int height):
    cdef double[:, ::1] pts = np.ascontiguousarray(points, dtype=np.float64)
    cdef double[:, ::1] m = np.ascontiguousarray(w2c, dtype=np.float64)
    cdef Py_ssize_t n = pts.shape[0]
    u_arr = np.empty(n, dtype=np.float64)
    v_arr = np.empty(n, dtype=np.float64)
    z_arr = np.empty(n, dtype=np.float64)
    s_arr = np.empty(n, dtype=np.uint8)
    cdef double[::1] u = u_arr
    cdef double[::1] v = v_arr
    cdef double[::1] z = z_arr
    cdef unsigned char[::1] s = s_arr
    cdef Py_ssize_t i
    cdef double xw, yw, zw, xc, yc, zc, uu, vv
    with nogil:
        for i in range(n):
            xw = pts[i, 0]
            yw = pts[i, 1]
            zw = pts[i, 2]
            xc = m[0, 0] * xw + m[0, 1] * yw + m[0, 2] * zw + m[0, 3]
            yc = m[1, 0] * xw + m[1, 1] * yw + m[1, 2] * zw + m[1, 3]
            zc = m[2, 0] * xw + m[2, 1] * yw + m[2, 2] * zw + m[2, 3]
            z[i] = zc
            if zc <= MIN_Z:
                u[i] = 0.0
                v[i] = 0.0
                s[i] = BEHIND_CAMERA
                continue
            uu = fx * xc / zc + cx
            vv = fy * yc / zc + cy
            u[i] = uu
            v[i] = vv
            if uu >= 0.0 and uu < width and vv >= 0.0 and vv < height:
                s[i] = VISIBLE
            else:
                s[i] = OUT_OF_FRAME
    return u_arr, v_arr, z_arr, s_arr


def depth_test(u, v, z, status, depth_mm, double tolerance_m):
    cdef double[::1] uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef double[::1] vv = np.ascontiguousarray(v, dtype=np.float64)
    cdef double[::1] zz = np.ascontiguousarray(z, dtype=np.float64)
    cdef cnp.uint16_t[:, ::1] depth = np.ascontiguousarray(depth_mm, dtype=np.uint16)
    out_arr = np.ascontiguousarray(status, dtype=np.uint8).copy()
    cdef unsigned char[::1] out = out_arr
    cdef Py_ssize_t n = uu.shape[0]
    cdef int h = depth.shape[0]
    cdef int w = depth.shape[1]
    cdef Py_ssize_t i
    cdef long px, py
    cdef double d
    with nogil:
        for i in range(n):
            if out[i] != VISIBLE:
                continue
            px = <long>floor(uu[i] + 0.5)
            py = <long>floor(vv[i] + 0.5)
            if px < 0:
                px = 0
            elif px > w - 1:
                px = w - 1
            if py < 0:
                py = 0
            elif py > h - 1:
                py = h - 1
            d = depth[py, px]
            if d == 0.0:
                out[i] = INVALID_DEPTH
            elif zz[i] - d / 1000.0 > tolerance_m:
                out[i] = OCCLUDED
    return out_arr


def splat(u, v, status, int radius, int height, int width):
    cdef double[::1] uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef double[::1] vv = np.ascontiguousarray(v, dtype=np.float64)
    cdef unsigned char[::1] st = np.ascontiguousarray(status, dtype=np.uint8)
    mask_arr = np.zeros((height, width), dtype=np.uint8)
    cdef unsigned char[:, ::1] mask = mask_arr
    cdef Py_ssize_t n = uu.shape[0]
    cdef Py_ssize_t i
    cdef long px, py, x, y
    cdef int dx, dy, r2
    r2 = radius * radius
    with nogil:
        for i in range(n):
            if st[i] != VISIBLE:
                continue
            px = <long>floor(uu[i] + 0.5)
            py = <long>floor(vv[i] + 0.5)
            if px < 0:
                px = 0
            elif px > width - 1:
                px = width - 1
            if py < 0:
                py = 0
            elif py > height - 1:
                py = height - 1
            for dy in range(-radius, radius + 1):
                y = py + dy
                if y < 0 or y >= height:
                    continue
                for dx in range(-radius, radius + 1):
                    if dx * dx + dy * dy > r2:
                        continue
                    x = px + dx
                    if x < 0 or x >= width:
                        continue
                    mask[y, x] = 1
    return mask_arr


def close(mask, int kernel):
    if kernel <= 1:
        return np.ascontiguousarray(mask, dtype=np.uint8).copy()
    cdef unsigned char[:, ::1] src = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef int h = src.shape[0]
    cdef int w = src.shape[1]
    cdef int r = kernel // 2
    dil_arr = np.zeros((h, w), dtype=np.uint8)
    out_arr = np.zeros((h, w), dtype=np.uint8)
    cdef unsigned char[:, ::1] dil = dil_arr
    cdef unsigned char[:, ::1] out = out_arr
    cdef int x, y, dx, dy, nx, ny
    cdef unsigned char hit
    with nogil:
        # dilation: outside the image counts as empty
        for y in range(h):
            for x in range(w):
                hit = 0
                for dy in range(-r, r + 1):
                    ny = y + dy
                    if ny < 0 or ny >= h:
                        continue
                    for dx in range(-r, r + 1):
                        nx = x + dx
                        if nx < 0 or nx >= w:
                            continue
                        if src[ny, nx] != 0:
                            hit = 1
                            break
                    if hit:
                        break
                dil[y, x] = hit
        # erosion: outside the image counts as filled
        for y in range(h):
            for x in range(w):
                hit = 1
                for dy in range(-r, r + 1):
                    ny = y + dy
                    if ny < 0 or ny >= h:
                        continue
                    for dx in range(-r, r + 1):
                        nx = x + dx
                        if nx < 0 or nx >= w:
                            continue
                        if dil[ny, nx] == 0:
                            hit = 0
                            break
                    if not hit:
                        break
                out[y, x] = hit
    return out_arr
