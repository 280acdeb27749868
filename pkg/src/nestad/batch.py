"""Vectorised arithmetic over many duals / nested duals at once.

Inputs are float arrays in flat layout: shape (n, 2) for duals,
(n, 4) for nested duals.  Results match the scalar classes component for
component (same formulas, same operation order).
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .errors import DomainError, ZeroPrimal
from .functions import AnalyticFn


def _as_flat(a, width: int) -> np.ndarray:
    arr = np.ascontiguousarray(a, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != width:
        raise ValueError(f"expected shape (n, {width}), got {arr.shape}")
    return arr


def _nonzero_primal(a: np.ndarray) -> None:
    bad = np.flatnonzero(a[:, 0] == 0.0)
    if bad.size:
        raise ZeroPrimal(f"{bad.size} element(s) with zero primal, first at row {bad[0]}")


def _vec(fn: AnalyticFn, x: np.ndarray):
    # registry predicates are plain comparisons and broadcast over arrays
    ok = np.isnan(x) | np.broadcast_to(np.asarray(fn.domain(x), dtype=bool), x.shape)
    if not ok.all():
        i = int(np.flatnonzero(~ok)[0])
        raise DomainError(f"{fn.name} is not analytic at {x[i]!r} (row {i})")
    if fn.array is not None:
        f, d1, d2 = fn.array
        with np.errstate(all="ignore"):
            return f(x), d1(x), d2(x)
    return (np.array([g(v) for v in x], dtype=np.float64) for g in (fn.f, fn.df, fn.d2f))


def dual_mul(a, b, backend: str | None = None) -> np.ndarray:
    return _kernels.backend(backend)["dual_mul"](_as_flat(a, 2), _as_flat(b, 2))


def dual_inv(a, backend: str | None = None) -> np.ndarray:
    a = _as_flat(a, 2)
    _nonzero_primal(a)
    return _kernels.backend(backend)["dual_inv"](a)


def dual_div(a, b, backend: str | None = None) -> np.ndarray:
    return dual_mul(a, dual_inv(b, backend), backend)


def dual_lift(fn: AnalyticFn, a, backend: str | None = None) -> np.ndarray:
    a = _as_flat(a, 2)
    f, d1, _ = _vec(fn, a[:, 0])
    return _kernels.backend(backend)["dual_lift"](a, f, d1)


def nested_mul(a, b, backend: str | None = None) -> np.ndarray:
    return _kernels.backend(backend)["nested_mul"](_as_flat(a, 4), _as_flat(b, 4))


def nested_inv(a, backend: str | None = None) -> np.ndarray:
    a = _as_flat(a, 4)
    _nonzero_primal(a)
    return _kernels.backend(backend)["nested_inv"](a)


def nested_div(a, b, backend: str | None = None) -> np.ndarray:
    return nested_mul(a, nested_inv(b, backend), backend)


def nested_lift(fn: AnalyticFn, a, backend: str | None = None) -> np.ndarray:
    a = _as_flat(a, 4)
    f, d1, d2 = _vec(fn, a[:, 0])
    return _kernels.backend(backend)["nested_lift"](a, f, d1, d2)
