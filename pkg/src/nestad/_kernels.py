"""Array kernels over flat layouts: duals as (n, 2), nested duals as (n, 4).

Every kernel has a numba loop and a vectorised numpy twin.  The numba
path is used when numba imports and ``NESTAD_DISABLE_NUMBA`` is unset or
"0".  Zero primals are not checked here; callers do that up front.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is optional
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("NESTAD_DISABLE_NUMBA", "0") in ("", "0")


def _njit(fn):
    if not HAVE_NUMBA:
        return None
    return numba.njit(cache=False, fastmath=False)(fn)


# numpy


def np_dual_mul(a, b):
    out = np.empty_like(a)
    out[:, 0] = a[:, 0] * b[:, 0]
    out[:, 1] = a[:, 0] * b[:, 1] + a[:, 1] * b[:, 0]
    return out


def np_dual_inv(a):
    out = np.empty_like(a)
    out[:, 0] = 1.0 / a[:, 0]
    out[:, 1] = -a[:, 1] / (a[:, 0] * a[:, 0])
    return out


def np_dual_lift(a, f, d1):
    out = np.empty_like(a)
    out[:, 0] = f
    out[:, 1] = a[:, 1] * d1
    return out


def np_nested_mul(a, b):
    x, xp, xd, xdp = a[:, 0], a[:, 1], a[:, 2], a[:, 3]
    y, yp, yd, ydp = b[:, 0], b[:, 1], b[:, 2], b[:, 3]
    out = np.empty_like(a)
    out[:, 0] = x * y
    out[:, 1] = x * yp + xp * y
    out[:, 2] = x * yd + xd * y
    out[:, 3] = x * ydp + xp * yd + xd * yp + xdp * y
    return out


def np_nested_inv(a):
    x, xp, xd, xdp = a[:, 0], a[:, 1], a[:, 2], a[:, 3]
    x2 = x * x
    out = np.empty_like(a)
    out[:, 0] = 1.0 / x
    out[:, 1] = -xp / x2
    out[:, 2] = -xd / x2
    out[:, 3] = (2.0 * xp * xd - x * xdp) / (x2 * x)
    return out


def np_nested_lift(a, f, d1, d2):
    xp, xd, xdp = a[:, 1], a[:, 2], a[:, 3]
    out = np.empty_like(a)
    out[:, 0] = f
    out[:, 1] = xp * d1
    out[:, 2] = xd * d1
    out[:, 3] = xp * xd * d2 + xdp * d1
    return out


# numba loops; same formulas, same operation order


def _nb_dual_mul(a, b):
    n = a.shape[0]
    out = np.empty((n, 2))
    for i in range(n):
        out[i, 0] = a[i, 0] * b[i, 0]
        out[i, 1] = a[i, 0] * b[i, 1] + a[i, 1] * b[i, 0]
    return out


def _nb_dual_inv(a):
    n = a.shape[0]
    out = np.empty((n, 2))
    for i in range(n):
        x = a[i, 0]
        out[i, 0] = 1.0 / x
        out[i, 1] = -a[i, 1] / (x * x)
    return out


def _nb_dual_lift(a, f, d1):
    n = a.shape[0]
    out = np.empty((n, 2))
    for i in range(n):
        out[i, 0] = f[i]
        out[i, 1] = a[i, 1] * d1[i]
    return out


def _nb_nested_mul(a, b):
    n = a.shape[0]
    out = np.empty((n, 4))
    for i in range(n):
        x, xp, xd, xdp = a[i, 0], a[i, 1], a[i, 2], a[i, 3]
        y, yp, yd, ydp = b[i, 0], b[i, 1], b[i, 2], b[i, 3]
        out[i, 0] = x * y
        out[i, 1] = x * yp + xp * y
        out[i, 2] = x * yd + xd * y
        out[i, 3] = x * ydp + xp * yd + xd * yp + xdp * y
    return out


def _nb_nested_inv(a):
    n = a.shape[0]
    out = np.empty((n, 4))
    for i in range(n):
        x, xp, xd, xdp = a[i, 0], a[i, 1], a[i, 2], a[i, 3]
        x2 = x * x
        out[i, 0] = 1.0 / x
        out[i, 1] = -xp / x2
        out[i, 2] = -xd / x2
        out[i, 3] = (2.0 * xp * xd - x * xdp) / (x2 * x)
    return out


def _nb_nested_lift(a, f, d1, d2):
    n = a.shape[0]
    out = np.empty((n, 4))
    for i in range(n):
        xp, xd, xdp = a[i, 1], a[i, 2], a[i, 3]
        out[i, 0] = f[i]
        out[i, 1] = xp * d1[i]
        out[i, 2] = xd * d1[i]
        out[i, 3] = xp * xd * d2[i] + xdp * d1[i]
    return out


nb_dual_mul = _njit(_nb_dual_mul)
nb_dual_inv = _njit(_nb_dual_inv)
nb_dual_lift = _njit(_nb_dual_lift)
nb_nested_mul = _njit(_nb_nested_mul)
nb_nested_inv = _njit(_nb_nested_inv)
nb_nested_lift = _njit(_nb_nested_lift)

NUMPY = {
    "dual_mul": np_dual_mul,
    "dual_inv": np_dual_inv,
    "dual_lift": np_dual_lift,
    "nested_mul": np_nested_mul,
    "nested_inv": np_nested_inv,
    "nested_lift": np_nested_lift,
}

NUMBA = (
    {
        "dual_mul": nb_dual_mul,
        "dual_inv": nb_dual_inv,
        "dual_lift": nb_dual_lift,
        "nested_mul": nb_nested_mul,
        "nested_inv": nb_nested_inv,
        "nested_lift": nb_nested_lift,
    }
    if HAVE_NUMBA
    else None
)


def backend(name: str | None = None) -> dict:
    """Kernel table for ``"numba"``, ``"numpy"`` or the env-selected default."""
    if name is None:
        name = "numba" if USE_NUMBA else "numpy"
    if name == "numba":
        if NUMBA is None:
            raise RuntimeError("numba backend requested but numba is not installed")
        return NUMBA
    if name == "numpy":
        return NUMPY
    raise ValueError(f"unknown backend {name!r}")
