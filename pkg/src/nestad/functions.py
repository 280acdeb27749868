"""Elementary analytic functions lifted to Dual and NestedDual.

Each :class:`AnalyticFn` carries closed-form first and second derivative
rules.  For analytic f the truncated Taylor expansion collapses to

    f(a + eps*a')                 = f(a) + eps * a' f'(a)
    f(x + e1 x' + e2 xd + e3 xd') = f(x) + e1 x' f'(x) + e2 xd f'(x)
                                    + e3 (x' xd f''(x) + xd' f'(x))

so no series is ever summed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np

from .dual import Dual, dual_inv, dual_mul
from .errors import DomainError, UnknownFunction, ZeroPrimal
from .nested import NestedDual, sa_inv, sa_mul

Scalar = Callable[[float], float]


def _always(x: float) -> bool:
    return True


def _positive(x: float) -> bool:
    return x > 0.0


@dataclass(frozen=True)
class AnalyticFn:
    """A named real-analytic function with its derivative rules.

    ``domain`` is the set where lifting is allowed.  The optional ``array``
    triple holds numpy versions of (f, df, d2f) for the batch kernels.
    """

    name: str
    f: Scalar
    df: Scalar
    d2f: Scalar
    domain: Callable[[float], bool] = _always
    array: tuple[Callable, Callable, Callable] | None = field(default=None, repr=False, compare=False)

    def __call__(self, a):
        return lift(self, a)


def _ieee(fn: Scalar) -> Scalar:
    # math raises where IEEE would return inf/nan; keep the arithmetic total
    def wrapped(x: float) -> float:
        try:
            return fn(x)
        except OverflowError:
            return math.inf
        except ValueError:
            return math.nan

    wrapped.__name__ = getattr(fn, "__name__", "f")
    return wrapped


_exp = _ieee(math.exp)
_sin = _ieee(math.sin)
_cos = _ieee(math.cos)
_tan = _ieee(math.tan)


def _neg(fn: Scalar) -> Scalar:
    return lambda x: -fn(x)


def _tan_d1(x: float) -> float:
    t = _tan(x)
    return 1.0 + t * t


def _tan_d2(x: float) -> float:
    t = _tan(x)
    return 2.0 * t * (1.0 + t * t)


def _np_tan_d1(x):
    t = np.tan(x)
    return 1.0 + t * t


def _np_tan_d2(x):
    t = np.tan(x)
    return 2.0 * t * (1.0 + t * t)


EXP = AnalyticFn("exp", _exp, _exp, _exp, array=(np.exp, np.exp, np.exp))
LOG = AnalyticFn(
    "log",
    math.log,
    lambda x: 1.0 / x,
    lambda x: -1.0 / (x * x),
    domain=_positive,
    array=(np.log, lambda x: 1.0 / x, lambda x: -1.0 / (x * x)),
)
SIN = AnalyticFn("sin", _sin, _cos, _neg(_sin), array=(np.sin, np.cos, lambda x: -np.sin(x)))
COS = AnalyticFn("cos", _cos, _neg(_sin), _neg(_cos), array=(np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x)))
TAN = AnalyticFn("tan", _tan, _tan_d1, _tan_d2, array=(np.tan, _np_tan_d1, _np_tan_d2))
# sqrt is not analytic at 0 (infinite slope), so 0 is outside the domain
SQRT = AnalyticFn(
    "sqrt",
    math.sqrt,
    lambda x: 0.5 / math.sqrt(x),
    lambda x: -0.25 / (x * math.sqrt(x)),
    domain=_positive,
    array=(np.sqrt, lambda x: 0.5 / np.sqrt(x), lambda x: -0.25 / (x * np.sqrt(x))),
)

_REGISTRY: dict[str, AnalyticFn] = {fn.name: fn for fn in (EXP, LOG, SIN, COS, TAN, SQRT)}


def power(r: float) -> AnalyticFn:
    """``t -> t**r`` for a real exponent; defined only for t > 0.

    Integer exponents on arbitrary bases go through :func:`pow_int` instead.
    """
    r = float(r)
    p = _ieee(lambda x: math.pow(x, r))
    p1 = _ieee(lambda x: r * math.pow(x, r - 1.0))
    p2 = _ieee(lambda x: r * (r - 1.0) * math.pow(x, r - 2.0))
    return AnalyticFn(
        f"pow[{r!r}]",
        p,
        p1,
        p2,
        domain=_positive,
        array=(
            lambda x: np.power(x, r),
            lambda x: r * np.power(x, r - 1.0),
            lambda x: r * (r - 1.0) * np.power(x, r - 2.0),
        ),
    )


def registry() -> Mapping[str, AnalyticFn]:
    """Read-only view of the built-in unary functions, keyed by name."""
    return MappingProxyType(_REGISTRY)


def lookup(name: str) -> AnalyticFn:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownFunction(f"unknown function {name!r}") from None


def _check_domain(fn: AnalyticFn, x: float) -> None:
    if not math.isnan(x) and not fn.domain(x):
        raise DomainError(f"{fn.name} is not analytic at {x!r}")


def lift_dual(fn: AnalyticFn, a: Dual) -> Dual:
    _check_domain(fn, a.val)
    return Dual(fn.f(a.val), a.der * fn.df(a.val))


def lift_nested(fn: AnalyticFn, a: NestedDual) -> NestedDual:
    x, xp, xd, xdp = a.as_tuple()
    _check_domain(fn, x)
    d1 = fn.df(x)
    d2 = fn.d2f(x)
    return NestedDual(
        Dual(fn.f(x), xp * d1),
        Dual(xd * d1, xp * xd * d2 + xdp * d1),
    )


def lift(fn: AnalyticFn, a):
    """Apply ``fn`` to a float, Dual or NestedDual."""
    if isinstance(a, NestedDual):
        return lift_nested(fn, a)
    if isinstance(a, Dual):
        return lift_dual(fn, a)
    _check_domain(fn, float(a))
    return fn.f(float(a))


def pow_int(a, n: int):
    """``a**n`` by repeated squaring, for Dual or NestedDual ``a``."""
    if isinstance(a, NestedDual):
        mul, inv, one = sa_mul, sa_inv, NestedDual(Dual(1.0, 0.0), Dual(0.0, 0.0))
        primal = a.val.val
    else:
        mul, inv, one = dual_mul, dual_inv, Dual(1.0, 0.0)
        primal = a.val
    if n < 0:
        if primal == 0.0:
            raise ZeroPrimal(f"negative power {n} of an element with zero primal")
        a, n = inv(a), -n
    result = one
    base = a
    while n:
        if n & 1:
            result = mul(result, base)
        n >>= 1
        if n:
            base = mul(base, base)
    return result
