"""Backend selection for the hot loops.

The compiled extension is used when it imports; set ``CORRWORK_PURE_PYTHON=1``
to force the numpy fallback.  ``BACKEND`` names the active choice.
"""
import os

from . import _fermion_py

try:
    if os.environ.get("CORRWORK_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python backend requested")
    from . import _fermion_kernel as _compiled
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"

project_evaluate = (_compiled or _fermion_py).project_evaluate

#: every importable backend, for tests and benchmarks
AVAILABLE = {"python": _fermion_py.project_evaluate}
if _compiled is not None:
    AVAILABLE["cython"] = _compiled.project_evaluate
