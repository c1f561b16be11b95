"""Pick the compiled sweep when it is importable, the pure-Python one otherwise.

Setting ``FRACBERN_PURE_PYTHON=1`` forces the pure-Python sweep.
"""
from __future__ import annotations

import os

from . import _sweep_py

BACKEND = "python"
sweep = _sweep_py.sweep

if os.environ.get("FRACBERN_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _sweep as _compiled
    except ImportError:  # extension not built
        _compiled = None
    if _compiled is not None:
        BACKEND = "cython"
        sweep = _compiled.sweep

__all__ = ["BACKEND", "sweep"]
