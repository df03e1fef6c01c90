"""Selects the kernel implementation at import time.

The compiled extension is used when it has been built; setting
``QSUBTEST_BACKEND=python`` forces the numpy fallback.
"""

import os

from . import _fallback

python_kernels = _fallback

try:
    from . import _kernels as compiled_kernels  # type: ignore[attr-defined]
except ImportError:  # extension not built
    compiled_kernels = None

if compiled_kernels is not None and os.environ.get("QSUBTEST_BACKEND", "") != "python":
    kernels = compiled_kernels
    BACKEND = "cython"
else:
    kernels = _fallback
    BACKEND = "python"


def use_backend(name):
    """Switch kernels at runtime ("cython" or "python"); returns the previous name."""
    global kernels, BACKEND
    previous = BACKEND
    if name == "cython":
        if compiled_kernels is None:
            raise RuntimeError("compiled kernels are not built")
        kernels = compiled_kernels
    elif name == "python":
        kernels = _fallback
    else:
        raise ValueError(f"unknown backend {name!r}")
    BACKEND = name
    return previous
