"""Backend selection for the word-table kernels.

The compiled extension ``_ckernels`` is used for float64 work when it was
built; otherwise, or when ``GIBBSFACTOR_PURE_PYTHON=1``, everything runs on
the numpy reference in ``_kernels_py``.  Exact (integer/object) tables always
use the reference implementation.
"""
import os

import numpy as np

from . import _kernels_py

_compiled = None
if os.environ.get("GIBBSFACTOR_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"


def backends():
    """Names of the usable backends, compiled first."""
    return ["compiled", "python"] if _compiled is not None else ["python"]


def _impl(backend):
    if backend is None:
        backend = BACKEND
    if backend == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return _compiled
    if backend == "python":
        return _kernels_py
    raise ValueError(f"unknown backend {backend!r}")


def fiber_levels(ytrans, wblocks, init, tail, depth, backend=None):
    arrays = (np.asarray(wblocks), np.asarray(init), np.asarray(tail))
    if any(a.dtype != np.float64 for a in arrays):
        backend = "python"
    return _impl(backend).fiber_levels(np.asarray(ytrans, dtype=np.int64), *arrays, depth)


def defect_extremes(codes, logs, ky, depth, backend=None):
    logs = [np.ascontiguousarray(x, dtype=np.float64) for x in logs]
    codes = [np.ascontiguousarray(x, dtype=np.int64) for x in codes]
    return _impl(backend).defect_extremes(codes, logs, ky, depth)
