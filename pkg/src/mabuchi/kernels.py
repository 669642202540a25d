"""Kernel backend selection.

The compiled ``_hullkernel`` extension is used when importable; otherwise the
numpy implementation in ``_hullkernel_py``. Set ``MABUCHI_PURE_PYTHON=1`` to
force the fallback.
"""

import os

from . import _hullkernel_py as python_backend

compiled_backend = None
if os.environ.get("MABUCHI_PURE_PYTHON", "") != "1":
    try:
        from . import _hullkernel as compiled_backend
    except ImportError:
        compiled_backend = None

_active = compiled_backend or python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

pivot = _active.pivot
max_plane = _active.max_plane

__all__ = ["BACKEND", "pivot", "max_plane", "python_backend", "compiled_backend"]
