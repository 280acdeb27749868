"""Nested dual numbers and the push / popV / popD protocol.

A :class:`NestedDual` is a pair of :class:`~nestad.dual.Dual` values
``(val, der)``.  Read flat it is the 4-tuple ``(x, x', xdot, xdot')``:

* ``x``      value of the nested function ``g(h(x))``
* ``x'``     original derivative, d/dx of ``g(h(x))``
* ``xdot``   nested derivative, dg/dy at ``y = h(x)``
* ``xdot'``  composite derivative, d/dx of the nested derivative

Arithmetic is defined on the pair by reusing dual arithmetic.  The flat
formulas (:func:`flat_add`, :func:`flat_mul`, ...) are an independent
second route over plain tuples; :func:`phi` and :func:`phi_inv` map
between the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dual import (
    Dual,
    dual_add,
    dual_mul,
    dual_neg,
    dual_scale,
    dual_sub,
)
from .errors import ZeroPrimal

Flat = tuple[float, float, float, float]


@dataclass(frozen=True, slots=True)
class NestedDual:
    val: Dual
    der: Dual

    @classmethod
    def from_tuple(cls, t) -> "NestedDual":
        x, xp, xd, xdp = t
        return cls(Dual(float(x), float(xp)), Dual(float(xd), float(xdp)))

    def as_tuple(self) -> Flat:
        return (self.val.val, self.val.der, self.der.val, self.der.der)

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return sa_add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return sa_sub(self, other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return sa_sub(other, self)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return sa_scale(other, self)
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return sa_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return sa_div(self, other)

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return sa_div(other, self)

    def __neg__(self):
        return sa_neg(self)

    def __pos__(self):
        return self

    def __pow__(self, n):
        if isinstance(n, int):
            from .functions import pow_int

            return pow_int(self, n)
        return NotImplemented


def _coerce(x):
    if isinstance(x, NestedDual):
        return x
    if isinstance(x, Dual):
        return embed_dual(x)
    if isinstance(x, (int, float)):
        return embed_real(x)
    return NotImplemented


def sa_add(a: NestedDual, b: NestedDual) -> NestedDual:
    return NestedDual(dual_add(a.val, b.val), dual_add(a.der, b.der))


def sa_sub(a: NestedDual, b: NestedDual) -> NestedDual:
    return NestedDual(dual_sub(a.val, b.val), dual_sub(a.der, b.der))


def sa_neg(a: NestedDual) -> NestedDual:
    return NestedDual(dual_neg(a.val), dual_neg(a.der))


def sa_mul(a: NestedDual, b: NestedDual) -> NestedDual:
    # (a, b)(c, d) = (ac, ad + bc) over duals
    return NestedDual(dual_mul(a.val, b.val), dual_add(dual_mul(a.val, b.der), dual_mul(a.der, b.val)))


def sa_inv(a: NestedDual) -> NestedDual:
    x, xp, xd, xdp = a.as_tuple()
    if x == 0.0:
        raise ZeroPrimal(f"nested dual {a.as_tuple()} has zero primal and no inverse")
    x2 = x * x
    return NestedDual(
        Dual(1.0 / x, -xp / x2),
        Dual(-xd / x2, (2.0 * xp * xd - x * xdp) / (x2 * x)),
    )


def sa_div(a: NestedDual, b: NestedDual) -> NestedDual:
    if b.val.val == 0.0:
        raise ZeroPrimal(f"division by nested dual {b.as_tuple()} with zero primal")
    return sa_mul(a, sa_inv(b))


def sa_scale(alpha: float, a: NestedDual) -> NestedDual:
    return NestedDual(dual_scale(alpha, a.val), dual_scale(alpha, a.der))


def embed_dual(a: Dual) -> NestedDual:
    return NestedDual(a, Dual(0.0, 0.0))


def embed_real(a: float) -> NestedDual:
    return NestedDual(Dual(float(a), 0.0), Dual(0.0, 0.0))


def push(x: Dual) -> NestedDual:
    """Mark ``x = h(x0)`` as the nested variable: derivative part seeded to (1, 0)."""
    return NestedDual(x, Dual(1.0, 0.0))


def popV(X: NestedDual) -> Dual:
    """(nested-function value, original derivative)."""
    return X.val


def popD(X: NestedDual) -> Dual:
    """(nested derivative, composite derivative)."""
    return X.der


def epsilon_units() -> tuple[NestedDual, NestedDual, NestedDual]:
    return (
        NestedDual.from_tuple((0, 1, 0, 0)),
        NestedDual.from_tuple((0, 0, 1, 0)),
        NestedDual.from_tuple((0, 0, 0, 1)),
    )


def sa_isclose(a: NestedDual, b: NestedDual, rel_tol: float = 1e-9, abs_tol: float = 0.0) -> bool:
    return all(
        math.isclose(p, q, rel_tol=rel_tol, abs_tol=abs_tol)
        for p, q in zip(a.as_tuple(), b.as_tuple())
    )


ZERO = embed_real(0.0)
ONE = embed_real(1.0)


# flat 4-tuple route


def phi(a: NestedDual) -> Flat:
    return a.as_tuple()


def phi_inv(t: Flat) -> NestedDual:
    return NestedDual.from_tuple(t)


def flat_add(a: Flat, b: Flat) -> Flat:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3])


def flat_mul(a: Flat, b: Flat) -> Flat:
    x, xp, xd, xdp = a
    y, yp, yd, ydp = b
    return (
        x * y,
        x * yp + xp * y,
        x * yd + xd * y,
        x * ydp + xp * yd + xd * yp + xdp * y,
    )
