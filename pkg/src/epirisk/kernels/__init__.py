"""Kernel backend selection.

The compiled core is preferred when importable; EPIRISK_PURE_PY=1 (or a
missing extension build) selects the pure-Python fallback. Both expose the
same functions with the same numerical behaviour.
"""

from __future__ import annotations

import os

from epirisk.kernels import _pykernels

if os.environ.get("EPIRISK_PURE_PY"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from epirisk.kernels import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

sigmoid = _impl.sigmoid
mixture_mean = _impl.mixture_mean
completion_offsets = _impl.completion_offsets
completion_weights = _impl.completion_weights
draw_risks = _impl.draw_risks
sequential_mean = _impl.sequential_mean


def backend_name() -> str:
    """Name of the active kernel backend ("compiled" or "python")."""
    return BACKEND
