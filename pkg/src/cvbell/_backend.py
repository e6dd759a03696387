"""Select the kernel implementation at import time.

The compiled ``_kernels`` extension is used when it imports; otherwise, or when
``CVBELL_PURE_PYTHON`` is set to a non-empty value, the pure-Python twin is used.
"""
import os

from . import _kernels_py

if os.environ.get("CVBELL_PURE_PYTHON"):
    kernels = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels
        BACKEND = "cython"
    except ImportError:
        kernels = _kernels_py
        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
