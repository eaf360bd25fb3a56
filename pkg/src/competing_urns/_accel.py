"""Numba switch.

Kernels are written once and decorated with :func:`njit` from this module.
Setting ``COMPETING_URNS_DISABLE_NUMBA=1`` before import turns the decorator
into the identity, so the very same source runs as plain Python/numpy. The
two paths consume ``numpy.random.Generator`` streams identically and must
produce identical trajectories (see tests/test_accel_parity.py).
"""

from __future__ import annotations

import os

_FLAG = "COMPETING_URNS_DISABLE_NUMBA"

NUMBA_ENABLED = os.environ.get(_FLAG, "").strip().lower() not in ("1", "true", "yes")

if NUMBA_ENABLED:
    try:
        import numba as _numba
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False

if NUMBA_ENABLED:

    def njit(*args, **kwargs):
        kwargs.setdefault("cache", True)
        kwargs.setdefault("nogil", True)
        if args and callable(args[0]):
            return _numba.njit(**kwargs)(args[0])
        return _numba.njit(*args, **kwargs)

else:

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def backend() -> str:
    return "numba" if NUMBA_ENABLED else "python"
