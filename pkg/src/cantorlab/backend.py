"""Kernel backend selection.

The walk-on-spheres estimator and the grid relaxation solver exist twice:
compiled with numba (default) and as pure-numpy vector code.  The active
backend is chosen once at import time from the ``CANTORLAB_BACKEND``
environment variable: ``numba``, ``numpy`` or ``auto`` (default).  Both
paths consume identical per-walk random streams, so they agree walk for
walk; ``benchmarks/bench_backends.py`` compares speed and output.
"""

import os

try:
    import numba  # noqa: F401

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency normally
    HAS_NUMBA = False

_requested = os.environ.get("CANTORLAB_BACKEND", "auto").strip().lower()

if _requested in ("", "auto"):
    ACTIVE = "numba" if HAS_NUMBA else "numpy"
elif _requested == "numba":
    if not HAS_NUMBA:
        raise RuntimeError("CANTORLAB_BACKEND=numba but numba is not importable")
    ACTIVE = "numba"
elif _requested == "numpy":
    ACTIVE = "numpy"
else:
    raise RuntimeError(f"unknown CANTORLAB_BACKEND value: {_requested!r}")


def active_backend() -> str:
    return ACTIVE


def use_numba() -> bool:
    return ACTIVE == "numba"
