"""Kernel backend selection.

Imports the compiled extension when present, otherwise the NumPy
fallback.  Set ``SCHATTENLAB_PURE_PYTHON=1`` to force the fallback (used
by the benchmark and for debugging).
"""

from __future__ import annotations

import os

if os.environ.get("SCHATTENLAB_PURE_PYTHON"):
    from . import _kernels_py as kernels

    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as kernels

        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
