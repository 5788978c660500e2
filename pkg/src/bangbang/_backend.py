"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
twins are used. Set ``BANGBANG_BACKEND=python`` to force the fallback, or
``BANGBANG_BACKEND=compiled`` to make a missing extension an error.
"""
import os

from . import _kernels_py

_choice = os.environ.get("BANGBANG_BACKEND", "auto").lower()

if _choice == "python":
    kernels = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels
        BACKEND = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise
        kernels = _kernels_py
        BACKEND = "python"


def available_backends():
    """Names and kernel modules importable in this environment."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        out["compiled"] = _kernels
    return out
