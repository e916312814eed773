"""Kernel backend selection: compiled extension if importable, numpy fallback.

SCANFORGE_GEOM_BACKEND=compiled|numpy forces one side (compiled raises if the
extension is missing). Both backends produce bit-identical outputs; the
compiled one just gets through large scans faster.
"""

from __future__ import annotations

import os

from . import _reference

_FORCED = os.environ.get("SCANFORGE_GEOM_BACKEND", "").strip().lower()

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

if _FORCED == "numpy":
    _active = _reference
    _name = "numpy"
elif _FORCED == "compiled":
    if _compiled is None:
        raise ImportError(
            "SCANFORGE_GEOM_BACKEND=compiled but scanforge.geom._kernels is not built; "
            "reinstall without SCANFORGE_SKIP_EXT or unset the override"
        )
    _active = _compiled
    _name = "compiled"
elif _compiled is not None:
    _active = _compiled
    _name = "compiled"
else:
    _active = _reference
    _name = "numpy"


def kernels():
    """The active kernel module."""
    return _active


def active_backend() -> str:
    return _name


def available_backends() -> dict:
    out = {"numpy": _reference}
    if _compiled is not None:
        out["compiled"] = _compiled
    return out
