"""Select the kernel backend at import time.

The compiled extension is used when it was built; ``FRSTR_PURE_PYTHON=1``
forces the numpy fallback (handy for comparisons and debugging).
"""
import os

if os.environ.get("FRSTR_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_py as kernels

    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _kernels_py as kernels

        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
