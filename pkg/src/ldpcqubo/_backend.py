"""Kernel backend selection.

Hot loops (annealing sweeps, belief-propagation flooding) have a numba
implementation and a pure-numpy implementation with identical semantics.
Numba is used when it imports and ``LDPCQUBO_DISABLE_NUMBA`` is not set to a
truthy value; the flag is read once, at import time.
"""

from __future__ import annotations

import os

DISABLE_ENV = "LDPCQUBO_DISABLE_NUMBA"

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore[no-redef]
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def _wrap(fn):
            return fn

        return _wrap


def _flag_set(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in {"1", "true", "yes", "on"}


USE_NUMBA = HAVE_NUMBA and not _flag_set(DISABLE_ENV)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


__all__ = ["DISABLE_ENV", "HAVE_NUMBA", "USE_NUMBA", "backend_name", "njit"]
