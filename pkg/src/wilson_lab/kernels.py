"""Backend selection for the hot kernels.

The compiled extension is used when it was built; set
``WILSON_LAB_PURE_PYTHON=1`` to force the numpy fallback.
"""
import os

import numpy as np

from . import _pykernels

try:
    if os.environ.get("WILSON_LAB_PURE_PYTHON"):
        raise ImportError("pure-Python backend requested")
    from . import _ckernels
except ImportError:
    _ckernels = None

BACKEND = "cython" if _ckernels is not None else "python"


def y_accumulate(pi_w, pi_wb, xi_w, xi_wb, c, weights, kappa, backend=None):
    backend = backend or BACKEND
    if backend == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not available in this install")
        arrs = [np.ascontiguousarray(x, dtype=np.complex128) for x in (pi_w, pi_wb, xi_w, xi_wb)]
        return _ckernels.y_accumulate(
            *arrs,
            np.ascontiguousarray(c, dtype=np.float64),
            np.ascontiguousarray(weights, dtype=np.float64),
            float(kappa),
        )
    return _pykernels.y_accumulate(pi_w, pi_wb, xi_w, xi_wb, c, weights, kappa)
