"""Backend selection for the hot loops.

The compiled Cython module is used when it imports; otherwise the pure
Python twin.  Set ``PROPERLAB_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

_INT64_SAFE = 2**62

if os.environ.get("PROPERLAB_PURE", "") not in ("", "0"):
    _compiled = None
else:
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def backend_module(name: str | None = None):
    """Return the kernel module for ``name`` ('cython', 'python' or None for active)."""
    name = name or BACKEND
    if name == "python":
        return _kernels_py
    if _compiled is None:
        raise ImportError("compiled kernels are not built")
    return _compiled


def _bareiss_fits(E: np.ndarray, B: np.ndarray) -> bool:
    k, d = E.shape[0], B.shape[1]
    s = min(k, d)
    if s == 0:
        return True
    entry = int(np.abs(E).max(initial=0)) * int(np.abs(B).max(initial=0)) * B.shape[0]
    minor = (int(s**0.5 + 1) * entry) ** s
    return 2 * minor * minor < _INT64_SAFE


def weyl_scan(code: int, E, B, max_rank: int, backend: str | None = None):
    """First Weyl element (scan order) with ``rank(E w B) <= max_rank``."""
    E = np.ascontiguousarray(E, dtype=np.int64).reshape(len(E), -1) if len(E) else np.zeros((0, len(B)), np.int64)
    B = np.ascontiguousarray(B, dtype=np.int64)
    mod = backend_module(backend)
    if mod is not _kernels_py and not _bareiss_fits(E, B):
        mod = _kernels_py
    return mod.weyl_scan(code, E, B, max_rank)


def log_singular_values(g, backend: str | None = None):
    return backend_module(backend).log_singular_values(np.asarray(g, dtype=np.float64))


def overlap_count(x, ginv, half, kind: int, backend: str | None = None) -> int:
    x = np.ascontiguousarray(x, dtype=np.float64)
    ginv = np.ascontiguousarray(ginv, dtype=np.float64)
    half = np.ascontiguousarray(half, dtype=np.float64)
    return int(backend_module(backend).overlap_count(x, ginv, half, kind))
