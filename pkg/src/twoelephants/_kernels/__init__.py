"""Kernel backend selection.

The compiled extension is preferred when built; the numpy implementation
is the fallback. Both produce bit-identical results. Set the environment
variable ``TWOELEPHANTS_KERNELS`` to ``pure`` or ``compiled`` to force a
backend before import.
"""

import os

from . import pure as _pure

_requested = os.environ.get("TWOELEPHANTS_KERNELS", "").strip().lower()

if _requested in ("pure", "python"):
    _impl = _pure
    BACKEND = "pure"
else:
    try:
        from . import _core as _impl
        BACKEND = "compiled"
    except ImportError:
        if _requested in ("compiled", "c", "cython"):
            raise
        _impl = _pure
        BACKEND = "pure"

walk_pair_paths = _impl.walk_pair_paths
dp_joint_table = _impl.dp_joint_table
moment_recursion_arrays = _impl.moment_recursion_arrays


def backend():
    """Name of the kernel backend selected at import time."""
    return BACKEND
