"""Kernel selection.

The compiled extension is used when it imports; otherwise the NumPy
fallback is used. Set ``HYPERCUBE_LSI_BACKEND=python`` to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
kernels = _pykernels

if os.environ.get("HYPERCUBE_LSI_BACKEND", "").lower() != "python":
    try:
        from . import _ckernels as kernels  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        pass
