"""Kernel backend selection.

The hot per-frame loops (grayscale, downsample, blur, Canny, Hough
accumulation) exist twice: a Cython extension and a pure NumPy fallback
with identical numerics. The extension is used when importable; set
LANEKEEP_PURE_PY=1 to force the fallback.
"""

from __future__ import annotations

import os

from . import pure

_FORCE_PURE = os.environ.get("LANEKEEP_PURE_PY", "") not in ("", "0")

try:
    from . import _core as compiled  # type: ignore[attr-defined]
except ImportError:
    compiled = None

active = pure if (_FORCE_PURE or compiled is None) else compiled


def available_backends() -> dict:
    """Name -> backend module for every importable backend."""
    out = {"pure": pure}
    if compiled is not None:
        out["compiled"] = compiled
    return out


def get_backend(name: str | None = None):
    if name is None:
        return active
    backends = available_backends()
    if name not in backends:
        raise KeyError(f"unknown backend {name!r}; have {sorted(backends)}")
    return backends[name]


def set_active(name: str):
    """Switch the process-wide backend (used by the benchmark comparison)."""
    global active
    active = get_backend(name)
    return active
