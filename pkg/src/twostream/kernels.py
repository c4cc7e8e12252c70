"""Kernel backend selection.

Prefers the compiled Cython extension and falls back to the pure-Python
implementation when the extension is unavailable.  Set TWOSTREAM_BACKEND to
"python" or "compiled" to force a backend (the latter raises if the extension
was not built).
"""

from __future__ import annotations

import importlib
import os

from . import _kernels_py

_forced = os.environ.get("TWOSTREAM_BACKEND", "")
if _forced not in ("", "compiled", "python"):
    raise ImportError(f"TWOSTREAM_BACKEND must be 'compiled' or 'python', got {_forced!r}")

if _forced == "python":
    _impl = _kernels_py
else:
    try:
        _impl = importlib.import_module("twostream._kernels")
    except ImportError:
        if _forced == "compiled":
            raise
        _impl = _kernels_py

BACKEND: str = _impl.BACKEND_NAME

KIND_EQUALITY = _kernels_py.KIND_EQUALITY
KIND_LINE = _kernels_py.KIND_LINE
KIND_HALFPLANE_LE = _kernels_py.KIND_HALFPLANE_LE
KIND_HALFPLANE_GE = _kernels_py.KIND_HALFPLANE_GE
KIND_LOG_ODDS_LE = _kernels_py.KIND_LOG_ODDS_LE
KIND_LOG_ODDS_GE = _kernels_py.KIND_LOG_ODDS_GE

bern_kl = _impl.bern_kl
kl_block_counts = _impl.kl_block_counts
project_line_root = _impl.project_line_root
project_logodds_root = _impl.project_logodds_root
line_grid_increments = _impl.line_grid_increments
logodds_grid_increments = _impl.logodds_grid_increments
run_stream = _impl.run_stream


def available_backends() -> list[str]:
    """Names of the kernel backends importable in this environment."""
    names = []
    try:
        importlib.import_module("twostream._kernels")
        names.append("compiled")
    except ImportError:
        pass
    names.append("python")
    return names
