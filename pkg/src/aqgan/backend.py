"""Kernel backend selection: compiled extension if available, numpy fallback otherwise."""

import os

from . import _kernels_py

try:
    if os.environ.get("AQGAN_PURE_PYTHON"):
        raise ImportError("pure-python backend forced")
    from . import _kernels

    HAS_COMPILED = True
    K = _kernels
except ImportError:
    HAS_COMPILED = False
    K = _kernels_py


def use(name):
    """Switch backend at runtime ('compiled' or 'python'); used by benchmarks/tests."""
    global K
    if name == "python":
        K = _kernels_py
    elif name == "compiled":
        if not HAS_COMPILED:
            raise RuntimeError("compiled kernels are not available")
        from . import _kernels

        K = _kernels
    else:
        raise ValueError(f"unknown backend {name!r}")


def active():
    return "compiled" if K is not _kernels_py else "python"
