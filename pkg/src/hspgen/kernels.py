"""Kernel backend selection.

The compiled extension is used when it imports cleanly; setting
``HSPGEN_PURE_PYTHON=1`` forces the pure Python fallback.
"""

import os

from hspgen import _pykernels
from hspgen._pykernels import NotDivisible

BACKEND = "python"
_impl = _pykernels

if not os.environ.get("HSPGEN_PURE_PYTHON"):
    try:
        from hspgen import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:  # extension not built
        _impl = _pykernels

add = _impl.add
addmul = _impl.addmul
clean = _impl.clean
exact_div = _impl.exact_div
mul = _impl.mul
scale = _impl.scale
shift = _impl.shift

__all__ = ["BACKEND", "NotDivisible", "add", "addmul", "clean", "exact_div", "mul", "scale", "shift"]
