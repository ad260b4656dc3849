"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the pure-Python
reference implementation is loaded. Setting ``SUPERMAG_PURE_PYTHON=1`` forces
the fallback, which is how the benchmark and the equivalence tests compare
the two.
"""
from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

if _compiled is not None and not os.environ.get("SUPERMAG_PURE_PYTHON"):
    BACKEND = "cython"
    mul_terms = _compiled.mul_terms
    eval_float = _compiled.eval_float
else:
    BACKEND = "python"
    mul_terms = _kernels_py.mul_terms
    eval_float = _kernels_py.eval_float

__all__ = ["BACKEND", "mul_terms", "eval_float", "compiled_available"]


def compiled_available() -> bool:
    return _compiled is not None
