"""Kernel backend selection.

The hot numeric kernels exist in two flavors: loop-style functions compiled
with numba's @njit, and vectorized pure-numpy equivalents. Which flavor the
package uses is decided once, at import time, from the WFCMDP_BACKEND
environment variable:

    WFCMDP_BACKEND=numba   force the jitted kernels (error if numba missing)
    WFCMDP_BACKEND=numpy   force the pure-numpy kernels
    unset / empty          numba if importable, numpy otherwise

Both flavors compute the same fixpoints and the same completed maps. The one
visible difference: when a propagation contradicts, the *coordinate* of the
reported empty cell can differ between flavors (it depends on processing
order), though whether/when a contradiction occurs does not.
"""

from __future__ import annotations

import os

_ENV_VAR = "WFCMDP_BACKEND"


def _numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def resolve_backend() -> str:
    """Return 'numba' or 'numpy' per the environment override."""
    raw = os.environ.get(_ENV_VAR, "").strip().lower()
    if raw == "numba":
        if not _numba_available():
            raise RuntimeError(
                f"{_ENV_VAR}=numba requested but numba is not importable"
            )
        return "numba"
    if raw == "numpy":
        return "numpy"
    if raw:
        raise RuntimeError(
            f"unknown {_ENV_VAR}={raw!r}; expected 'numba' or 'numpy'"
        )
    return "numba" if _numba_available() else "numpy"


def available_backends() -> tuple[str, ...]:
    if _numba_available():
        return ("numba", "numpy")
    return ("numpy",)
