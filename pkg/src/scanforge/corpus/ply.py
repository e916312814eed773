"""Minimal binary-little-endian PLY io for colored point clouds.

Only the schema this corpus uses is supported: float32 x,y,z plus uchar
red,green,blue. Anything else is rejected rather than guessed at.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import MissingFile, SchemaViolation

_VERTEX_DTYPE = np.dtype(
    [
        ("x", "<f4"),
        ("y", "<f4"),
        ("z", "<f4"),
        ("red", "u1"),
        ("green", "u1"),
        ("blue", "u1"),
    ]
)


def write_ply(path, points: np.ndarray, colors: np.ndarray):
    points = np.asarray(points, dtype=np.float32)
    colors = np.asarray(colors, dtype=np.uint8)
    if points.ndim != 2 or points.shape[1] != 3 or colors.shape != points.shape:
        raise SchemaViolation("write_ply needs (N,3) points and matching colors")
    n = points.shape[0]
    header = "\n".join(
        [
            "ply",
            "format binary_little_endian 1.0",
            f"element vertex {n}",
            "property float x",
            "property float y",
            "property float z",
            "property uchar red",
            "property uchar green",
            "property uchar blue",
            "end_header",
            "",
        ]
    )
    body = np.empty(n, dtype=_VERTEX_DTYPE)
    body["x"], body["y"], body["z"] = points[:, 0], points[:, 1], points[:, 2]
    body["red"], body["green"], body["blue"] = colors[:, 0], colors[:, 1], colors[:, 2]
    with Path(path).open("wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(body.tobytes())


def read_ply(path) -> tuple[np.ndarray, np.ndarray]:
    """Returns (points float32 (N,3), colors uint8 (N,3))."""
    path = Path(path)
    if not path.exists():
        raise MissingFile(f"no such PLY file: {path}")
    with path.open("rb") as fh:
        raw = fh.read()
    end = raw.find(b"end_header\n")
    if end < 0:
        raise SchemaViolation(f"{path}: missing PLY end_header")
    header_lines = raw[:end].decode("ascii", errors="replace").splitlines()
    body = raw[end + len(b"end_header\n") :]

    if not header_lines or header_lines[0].strip() != "ply":
        raise SchemaViolation(f"{path}: not a PLY file")
    fmt = next((l for l in header_lines if l.startswith("format")), "")
    if "binary_little_endian" not in fmt:
        raise SchemaViolation(f"{path}: PLY format must be binary_little_endian, got {fmt!r}")
    count = None
    props = []
    for line in header_lines:
        parts = line.split()
        if parts[:2] == ["element", "vertex"]:
            count = int(parts[2])
        elif parts and parts[0] == "element" and parts[1] != "vertex":
            raise SchemaViolation(f"{path}: unsupported PLY element {parts[1]!r}")
        elif parts and parts[0] == "property":
            props.append((parts[1], parts[2]))
    expected = [
        ("float", "x"),
        ("float", "y"),
        ("float", "z"),
        ("uchar", "red"),
        ("uchar", "green"),
        ("uchar", "blue"),
    ]
    if count is None:
        raise SchemaViolation(f"{path}: PLY header missing vertex element")
    if props != expected:
        raise SchemaViolation(f"{path}: PLY properties {props} != expected {expected}")
    nbytes = count * _VERTEX_DTYPE.itemsize
    if len(body) < nbytes:
        raise SchemaViolation(f"{path}: PLY body truncated ({len(body)} < {nbytes} bytes)")
    verts = np.frombuffer(body[:nbytes], dtype=_VERTEX_DTYPE)
    points = np.stack([verts["x"], verts["y"], verts["z"]], axis=1).astype(np.float32)
    colors = np.stack([verts["red"], verts["green"], verts["blue"]], axis=1).astype(np.uint8)
    return points, colors
