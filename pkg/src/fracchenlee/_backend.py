"""Select the kernel backend at import time.

The compiled extension is used when it was built; set ``FRACCHENLEE_PURE=1`` to
force the pure-Python kernels.
"""
import os

from . import _pykernels

if os.environ.get("FRACCHENLEE_PURE"):
    kernels = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as kernels
        BACKEND = "cython"
    except ImportError:
        kernels = _pykernels
        BACKEND = "python"

__all__ = ["BACKEND", "kernels"]
