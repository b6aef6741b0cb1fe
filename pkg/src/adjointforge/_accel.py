"""Numba switch.

Kernels are written once in a numba-compatible subset of python. With
``ADJOINTFORGE_NUMBA=0`` (or numba missing) they run as plain python over
numpy arrays; the uncompiled body is always reachable as ``kernel.py_func``
so both paths can be compared in one process.
"""

import os

_flag = os.environ.get("ADJOINTFORGE_NUMBA", "1").strip().lower()
USE_NUMBA = _flag not in {"0", "false", "no", "off"}

if USE_NUMBA:
    try:
        import numba
    except ImportError:  # pragma: no cover
        USE_NUMBA = False


def njit(func=None, **options):
    def wrap(f):
        if USE_NUMBA:
            return numba.njit(cache=True, **options)(f)
        f.py_func = f
        return f

    if func is not None:
        return wrap(func)
    return wrap
