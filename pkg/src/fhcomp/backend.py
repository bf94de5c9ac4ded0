"""Kernel backend selection: numba-jitted loops or plain numpy.

The environment variable ``FHCOMP_NUMBA`` controls the choice:

* unset or ``auto`` -- use numba when it imports cleanly,
* ``1`` / ``true`` / ``on`` -- require numba (ImportError if missing),
* ``0`` / ``false`` / ``off`` -- force the pure-numpy fallback.

Both paths compute the same arithmetic in the same order, so results
are identical bit for bit.
"""

import os

_FLAG = os.environ.get("FHCOMP_NUMBA", "auto").strip().lower()

if _FLAG in ("0", "false", "off", "no"):
    NUMBA_ENABLED = False
elif _FLAG in ("1", "true", "on", "yes"):
    import numba  # noqa: F401

    NUMBA_ENABLED = True
else:
    try:
        import numba  # noqa: F401

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False


def backend_name() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"


def maybe_njit(func):
    """Jit-compile ``func`` when the numba backend is active."""
    if NUMBA_ENABLED:
        from numba import njit

        return njit(cache=True)(func)
    return func
