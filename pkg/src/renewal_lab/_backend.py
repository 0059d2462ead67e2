"""Pick the compiled walk kernel when it is importable.

Set ``RENEWAL_LAB_PURE_PYTHON=1`` to force the numpy fallback.
"""
import os

from renewal_lab import _walk_py

_compiled = None
if not os.environ.get("RENEWAL_LAB_PURE_PYTHON"):
    try:
        from renewal_lab import _walk_kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"
kernels = _compiled if _compiled is not None else _walk_py
walk_hits = kernels.walk_hits
draw_steps = kernels.draw_steps
