"""Backend selection for the fusion search kernel.

The compiled ``_core`` extension is used when importable; setting
``TCC_PURE_PYTHON=1`` forces the reference implementation.
"""

import os

from . import _core_py

if os.environ.get("TCC_PURE_PYTHON", "") not in ("", "0"):
    core = _core_py
else:
    try:
        from . import _core as core
    except ImportError:  # extension not built
        core = _core_py

BACKEND = "python" if core is _core_py else "cython"

__all__ = ["core", "BACKEND", "_core_py"]
