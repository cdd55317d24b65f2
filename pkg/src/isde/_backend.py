"""Pick the compiled kernels when available, the numpy fallback otherwise.

Set ``ISDE_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

kde_kernels = _pykernels
solver_kernels = _pykernels
BACKEND = "python"

if os.environ.get("ISDE_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _kde_core, _solver_core
    except ImportError:
        pass
    else:
        kde_kernels = _kde_core
        solver_kernels = _solver_core
        BACKEND = "compiled"
