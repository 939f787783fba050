"""Hot numerical kernels.

The compiled extension is used when it was built; otherwise the pure-Python
module with identical signatures is loaded. Set ROBINSTAB_PURE_PYTHON=1 to
force the fallback.
"""

import os

from . import _pykernels as python_backend

compiled_backend = None
if os.environ.get("ROBINSTAB_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled_backend
    except ImportError:
        compiled_backend = None

_active = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "compiled" if compiled_backend is not None else "python"

sturm_count = _active.sturm_count
bisect_smallest = _active.bisect_smallest
tridiag_solve = _active.tridiag_solve
rk4_linear = _active.rk4_linear
invert_bridge = _active.invert_bridge

__all__ = ["BACKEND", "sturm_count", "bisect_smallest", "tridiag_solve",
           "rk4_linear", "invert_bridge", "python_backend", "compiled_backend"]
