"""Kernel backend selection.

The compiled extension is used when it imports; setting the environment
variable ``TAILCOMPAT_PURE_PYTHON=1`` forces the numpy fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("TAILCOMPAT_PURE_PYTHON") != "1":
    try:
        from . import _ckernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

first_entering_column = _impl.first_entering_column
coexceedance_counts = _impl.coexceedance_counts


def available_backends() -> dict:
    """Map backend name to kernel module for every backend that imports."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels

        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
