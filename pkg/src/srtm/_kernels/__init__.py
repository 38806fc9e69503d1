"""Combine-kernel backends for the scan engine.

The compiled Cython module is used when it was built; otherwise the numpy
fallback is selected at import. ``SRTM_KERNELS=python`` forces the fallback,
``SRTM_KERNELS=compiled`` makes a missing extension an import error.
"""

import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["compiled"] = _ckernels


def get_backend(name=None):
    """Return the kernel module for ``name`` (``None``/"auto" picks the default)."""
    name = name or os.environ.get("SRTM_KERNELS", "auto")
    if name == "auto":
        return BACKENDS.get("compiled", _pykernels)
    try:
        return BACKENDS[name]
    except KeyError:
        if name == "compiled":
            raise ImportError("compiled kernels requested but srtm._kernels._ckernels is not built")
        raise ValueError(f"unknown kernel backend {name!r}; choose from {sorted(BACKENDS)}")


def available():
    return sorted(BACKENDS)
