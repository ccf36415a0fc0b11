"""Kernel backend selection.

The hot jet kernels exist twice: numba-jitted loops and a pure-numpy fallback.
``MOEBIUS_LAB_BACKEND`` picks one:

* unset / ``auto`` -- numba when importable, numpy otherwise
* ``numba``        -- require numba, fail loudly if missing
* ``numpy``        -- force the fallback (useful for debugging and benchmarks)

Selection happens once at import; ``benchmarks/bench_backends.py`` compares the
two by launching one subprocess per setting.
"""

import os

_requested = os.environ.get("MOEBIUS_LAB_BACKEND", "auto").strip().lower() or "auto"

if _requested not in ("auto", "numba", "numpy"):
    raise RuntimeError(
        f"MOEBIUS_LAB_BACKEND={_requested!r}: expected 'auto', 'numba' or 'numpy'"
    )

if _requested == "numpy":
    from . import _kernels_numpy as _impl

    BACKEND = "numpy"
else:
    try:
        from . import _kernels_numba as _impl

        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise RuntimeError("MOEBIUS_LAB_BACKEND=numba but numba is not importable")
        from . import _kernels_numpy as _impl

        BACKEND = "numpy"

TABLE = _impl.TABLE
mul = _impl.mul
div = _impl.div
pair = _impl.pair
scale_vec = _impl.scale_vec
compose = _impl.compose
