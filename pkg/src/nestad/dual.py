"""Dual numbers: pairs (value, derivative) with eps**2 = 0 arithmetic."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ZeroPrimal


@dataclass(frozen=True, slots=True)
class Dual:
    """An element ``val + der*eps`` of the dual numbers.

    Any pair of floats is a valid Dual.  Equality is exact and
    component-wise; use :func:`dual_isclose` for tolerant comparison.
    """

    val: float
    der: float = 0.0

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return dual_add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return dual_sub(self, other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return dual_sub(other, self)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return dual_scale(other, self)
        if not isinstance(other, Dual):
            return NotImplemented
        return dual_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return dual_div(self, other)

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return dual_div(other, self)

    def __neg__(self):
        return dual_neg(self)

    def __pos__(self):
        return self

    def __pow__(self, n):
        if isinstance(n, int):
            from .functions import pow_int

            return pow_int(self, n)
        return NotImplemented

    def as_tuple(self) -> tuple[float, float]:
        return (self.val, self.der)


def _coerce(x):
    if isinstance(x, Dual):
        return x
    if isinstance(x, (int, float)):
        return lift_real(x)
    return NotImplemented


def dual_add(a: Dual, b: Dual) -> Dual:
    return Dual(a.val + b.val, a.der + b.der)


def dual_sub(a: Dual, b: Dual) -> Dual:
    return Dual(a.val - b.val, a.der - b.der)


def dual_neg(a: Dual) -> Dual:
    return Dual(-a.val, -a.der)


def dual_mul(a: Dual, b: Dual) -> Dual:
    return Dual(a.val * b.val, a.val * b.der + a.der * b.val)


def dual_inv(a: Dual) -> Dual:
    """``(1/a, -a'/a**2)``; raises ZeroPrimal when the primal is exactly 0."""
    if a.val == 0.0:
        raise ZeroPrimal(f"dual {a.as_tuple()} has zero primal and no inverse")
    return Dual(1.0 / a.val, -a.der / (a.val * a.val))


def dual_div(a: Dual, b: Dual) -> Dual:
    if b.val == 0.0:
        raise ZeroPrimal(f"division by dual {b.as_tuple()} with zero primal")
    return Dual(a.val / b.val, (b.val * a.der - a.val * b.der) / (b.val * b.val))


def dual_scale(alpha: float, a: Dual) -> Dual:
    return Dual(alpha * a.val, alpha * a.der)


def lift_real(a: float) -> Dual:
    """Embed a real as a constant (zero tangent)."""
    return Dual(float(a), 0.0)


def dual_variable(a: float) -> Dual:
    """Seed an independent variable: tangent 1."""
    return Dual(float(a), 1.0)


def unit_dual() -> Dual:
    return Dual(0.0, 1.0)


def dual_isclose(a: Dual, b: Dual, rel_tol: float = 1e-9, abs_tol: float = 0.0) -> bool:
    return math.isclose(a.val, b.val, rel_tol=rel_tol, abs_tol=abs_tol) and math.isclose(
        a.der, b.der, rel_tol=rel_tol, abs_tol=abs_tol
    )


ZERO = Dual(0.0, 0.0)
ONE = Dual(1.0, 0.0)
EPS = Dual(0.0, 1.0)
