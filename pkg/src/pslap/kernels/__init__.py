"""Kernel backend selection.

The compiled Cython extension is preferred when it imported cleanly; the
numpy fallback is bit-compatible. Set PSLAP_PURE_PYTHON=1 to force the
fallback (useful for debugging and for the backend-equivalence tests).
"""

from __future__ import annotations

import os

from . import pykernels

_FORCE_PURE = os.environ.get("PSLAP_PURE_PYTHON", "") in ("1", "true", "yes")

if not _FORCE_PURE:
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = pykernels
        BACKEND = "python"
else:
    _impl = pykernels
    BACKEND = "python"

vr_edges = _impl.vr_edges
vr_triangles = _impl.vr_triangles
d0_values = _impl.d0_values
d1_values = _impl.d1_values


def available_backends() -> dict:
    """Importable backend modules keyed by name (for tests/benchmarks)."""
    out = {"python": pykernels}
    try:
        from . import _ckernels

        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
