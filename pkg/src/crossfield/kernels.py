"""Backend selection for the hot kernels.

The compiled extension is used when it imports cleanly; otherwise, or when
``CROSSFIELD_PURE_PYTHON`` is set to a non-empty value other than ``0``, the
pure-Python module is used. Both expose the same functions.
"""

from __future__ import annotations

import logging
import os

from . import _kernels_py

log = logging.getLogger(__name__)


def _load():
    if os.environ.get("CROSSFIELD_PURE_PYTHON", "") not in ("", "0"):
        return _kernels_py, "python"
    try:
        from . import _kernels  # type: ignore[attr-defined]
    except ImportError:
        log.debug("compiled kernels unavailable, using pure-Python fallback")
        return _kernels_py, "python"
    return _kernels, "compiled"


_backend, BACKEND = _load()

ula_crossing = _backend.ula_crossing
solve_rr_batch = _backend.solve_rr_batch
