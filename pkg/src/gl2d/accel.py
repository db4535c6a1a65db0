"""Kernel backend selection.

Hot inner loops live twice: once as numba ``@njit`` loop kernels
(`_kernels_numba`) and once as vectorized numpy fallbacks
(`_kernels_numpy`).  The compiled path is the default; setting the
environment variable ``GL2D_NUMBA=0`` (or any of ``no``/``false``/``off``)
before import selects the numpy path.  Both implementations are exact and
are differentially tested against each other.
"""

from __future__ import annotations

import os

_FLAG = os.environ.get("GL2D_NUMBA", "1").strip().lower()
_WANT_NUMBA = _FLAG not in ("0", "no", "false", "off")

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency normally
    HAVE_NUMBA = False

USE_NUMBA = _WANT_NUMBA and HAVE_NUMBA

_kernels = None


def kernels():
    """Return the active kernel module (numba-compiled or numpy)."""
    global _kernels
    if _kernels is None:
        if USE_NUMBA:
            from . import _kernels_numba as mod
        else:
            from . import _kernels_numpy as mod
        _kernels = mod
    return _kernels


def kernel_backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
