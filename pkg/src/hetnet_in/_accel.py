"""Kernel backend selection.

Set HETNET_IN_NO_NUMBA=1 to force the NumPy/scipy fallback (used by the
benchmark script and as a safety hatch on platforms without numba).
"""

from __future__ import annotations

import os

_flag = os.environ.get("HETNET_IN_NO_NUMBA", "").strip().lower()
USE_NUMBA = _flag not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        from . import _kernels_numba as kernels  # noqa: F401
    except ImportError:  # pragma: no cover - numba is a hard dependency
        from . import _kernels_numpy as kernels  # noqa: F401
        USE_NUMBA = False
else:
    from . import _kernels_numpy as kernels  # noqa: F401
