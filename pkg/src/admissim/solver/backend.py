"""LP kernel selection.

ADMISSIM_BACKEND=numpy forces the pure-numpy path, =numba forces the
jitted path (import error propagates).  Unset: numba when importable,
numpy otherwise.
"""

from __future__ import annotations

import os

from . import simplex_numpy

_ENV = "ADMISSIM_BACKEND"


def _pick():
    choice = os.environ.get(_ENV, "").strip().lower()
    if choice == "numpy":
        return simplex_numpy.lp_solve, "numpy"
    if choice == "numba":
        from . import simplex_numba
        return simplex_numba.lp_solve, "numba"
    if choice:
        raise ValueError(f"{_ENV} must be 'numba' or 'numpy', got {choice!r}")
    try:
        from . import simplex_numba
        return simplex_numba.lp_solve, "numba"
    except ImportError:
        return simplex_numpy.lp_solve, "numpy"


lp_solve, _BACKEND = _pick()


def backend_name() -> str:
    return _BACKEND
