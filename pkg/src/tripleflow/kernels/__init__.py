"""Kernel backend selection.

The compiled Cython extension (``_stencils``) is preferred when it imported
cleanly; otherwise the numpy slicing twin is used.  Both expose the same
functions with identical semantics, and the test suite asserts they agree to
machine precision.  Set ``TRIPLEFLOW_FORCE_NUMPY=1`` to skip the extension
(used by the benchmark to time both sides).
"""

from __future__ import annotations

import os

from . import numpy_backend

_impl = numpy_backend
BACKEND = "numpy"

_REQUIRED = (
    "laplacian",
    "div_faces",
    "grad_x_faces",
    "grad_y_faces",
    "avg_x_faces",
    "avg_y_faces",
    "varcoef_poisson_apply",
    "visc_apply",
)

if os.environ.get("TRIPLEFLOW_FORCE_NUMPY", "") not in ("1", "true", "yes"):
    try:
        from . import _stencils  # type: ignore[attr-defined]
    except ImportError:
        pass
    else:
        if all(hasattr(_stencils, name) for name in _REQUIRED):
            _impl = _stencils
            BACKEND = "cython"

laplacian = _impl.laplacian
div_faces = _impl.div_faces
grad_x_faces = _impl.grad_x_faces
grad_y_faces = _impl.grad_y_faces
avg_x_faces = _impl.avg_x_faces
avg_y_faces = _impl.avg_y_faces
varcoef_poisson_apply = _impl.varcoef_poisson_apply
visc_apply = _impl.visc_apply
