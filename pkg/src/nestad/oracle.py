"""Ground truth that does not go through dual arithmetic.

Two independent routes:

* central finite differences (:func:`fd_first`, :func:`fd_mixed`) on
  plain-float functions;
* an exact symbolic differentiator (:func:`sym_diff`) over the
  expression AST, whose output is evaluated with plain floats by
  :func:`eval_real`.

The symbolic rules and the float function table below are written
independently of :mod:`nestad.functions`, so a wrong derivative rule in
the registry shows up as a disagreement.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Callable, Mapping

from .errors import DomainError, NonFinite, UnknownFunction, UndefinedVariable, ZeroPrimal
from .expr import Add, Call, Const, DCall, Def, Div, Expr, Mul, Neg, Pow, Sub, Var, free_vars, subst

EPS = sys.float_info.epsilon


@dataclass(frozen=True)
class FDConfig:
    """Step rule and tolerances for finite differences.

    With ``step`` unset the step is ``cbrt(eps)*max(1,|x|)`` for first
    derivatives and ``eps**0.25*max(1,|x|)`` for second/mixed ones.
    """

    step: float | None = None
    rel_tol: float = 1e-5
    abs_tol: float = 1e-6
    nested_rel_tol: float = 1e-3

    def __post_init__(self):
        if self.step is not None and not self.step > 0:
            raise ValueError("fd step must be positive")
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.nested_rel_tol > 0):
            raise ValueError("tolerances must be positive")

    def first_step(self, x: float) -> float:
        if self.step is not None:
            return self.step
        return EPS ** (1 / 3) * max(1.0, abs(x))

    def second_step(self, x: float) -> float:
        if self.step is not None:
            return self.step
        return EPS**0.25 * max(1.0, abs(x))

    def agrees(self, value: float, reference: float) -> bool:
        return abs(value - reference) <= max(self.abs_tol, self.rel_tol * abs(reference))


DEFAULT_FD = FDConfig()


def _finite(*vals: float) -> None:
    if not all(math.isfinite(v) for v in vals):
        raise NonFinite(f"finite-difference sample is not finite: {vals}")


def fd_first(f: Callable[[float], float], x: float, cfg: FDConfig = DEFAULT_FD) -> float:
    h = cfg.first_step(x)
    fp, fm = f(x + h), f(x - h)
    _finite(fp, fm)
    return (fp - fm) / (2 * h)


def fd_first_wide(f: Callable[[float], float], x: float, cfg: FDConfig = DEFAULT_FD) -> float:
    """Central difference with the second-order step.

    Used where the result is differentiated again, so rounding noise
    matters more than truncation error.
    """
    h = cfg.second_step(x)
    fp, fm = f(x + h), f(x - h)
    _finite(fp, fm)
    return (fp - fm) / (2 * h)


def fd_mixed(f2: Callable[[float, float], float], x: float, y: float, cfg: FDConfig = DEFAULT_FD) -> float:
    h = cfg.second_step(x)
    k = cfg.second_step(y)
    pp, pm = f2(x + h, y + k), f2(x + h, y - k)
    mp, mm = f2(x - h, y + k), f2(x - h, y - k)
    _finite(pp, pm, mp, mm)
    return (pp - pm - mp + mm) / (4 * h * k)


# plain-float evaluation


def _real_log(x: float) -> float:
    if not x > 0:
        raise DomainError(f"log of non-positive {x!r}")
    return math.log(x)


def _real_sqrt(x: float) -> float:
    if x < 0:
        raise DomainError(f"sqrt of negative {x!r}")
    return math.sqrt(x)


def _real_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


REAL_FUNCTIONS: dict[str, Callable[[float], float]] = {
    "exp": _real_exp,
    "log": _real_log,
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "sqrt": _real_sqrt,
}


def _real_pow(a: float, b: float) -> float:
    if a == 0.0 and b < 0:
        raise ZeroPrimal("zero raised to a negative power")
    try:
        return math.pow(a, b)
    except OverflowError:
        return math.inf
    except ValueError:
        raise DomainError(f"{a!r}^{b!r} is not real") from None


def eval_real(
    e: Expr,
    env: Mapping[str, float],
    defs: Mapping[str, Def] | None = None,
    dcall: str = "symbolic",
    cfg: FDConfig = DEFAULT_FD,
) -> float:
    """Evaluate ``e`` over floats.

    ``D(g)(h)`` is computed from the symbolic derivative of g when
    ``dcall == "symbolic"`` and from a central difference of g when
    ``dcall == "fd"``.
    """
    defs = defs or {}

    def ev(e: Expr, env: Mapping[str, float]) -> float:
        if isinstance(e, Const):
            return e.value
        if isinstance(e, Var):
            try:
                return env[e.name]
            except KeyError:
                raise UndefinedVariable(f"variable {e.name!r} is not bound", e.pos) from None
        if isinstance(e, Add):
            return ev(e.left, env) + ev(e.right, env)
        if isinstance(e, Sub):
            return ev(e.left, env) - ev(e.right, env)
        if isinstance(e, Mul):
            return ev(e.left, env) * ev(e.right, env)
        if isinstance(e, Div):
            num, den = ev(e.left, env), ev(e.right, env)
            if den == 0.0:
                raise ZeroPrimal("division by zero", e.pos)
            return num / den
        if isinstance(e, Neg):
            return -ev(e.operand, env)
        if isinstance(e, Pow):
            return _real_pow(ev(e.base, env), ev(e.exponent, env))
        if isinstance(e, Call):
            arg = ev(e.arg, env)
            if e.fn in REAL_FUNCTIONS:
                return REAL_FUNCTIONS[e.fn](arg)
            if e.fn in defs:
                d = defs[e.fn]
                return ev(d.body, {d.param: arg})
            raise UnknownFunction(f"unknown function {e.fn!r}", e.pos)
        if isinstance(e, DCall):
            d = _def(defs, e)
            y0 = ev(e.arg, env)
            if dcall == "symbolic":
                return ev(derivative_of_def(d, defs), {d.param: y0})
            return fd_first_wide(lambda y: ev(d.body, {d.param: y}), y0, cfg)
        raise TypeError(f"not an expression node: {e!r}")

    return ev(e, env)


def _def(defs: Mapping[str, Def], e: DCall) -> Def:
    try:
        return defs[e.fn]
    except KeyError:
        raise UnknownFunction(f"unknown function {e.fn!r}", e.pos) from None


# symbolic differentiation

ZERO, ONE, TWO = Const(0.0), Const(1.0), Const(2.0)


def _is(e: Expr, v: float) -> bool:
    return isinstance(e, Const) and e.value == v


def _add(a, b):
    if _is(a, 0):
        return b
    if _is(b, 0):
        return a
    return Add(a, b)


def _sub(a, b):
    if _is(b, 0):
        return a
    if _is(a, 0):
        return _neg(b)
    return Sub(a, b)


def _mul(a, b):
    if _is(a, 0) or _is(b, 0):
        return ZERO
    if _is(a, 1):
        return b
    if _is(b, 1):
        return a
    return Mul(a, b)


def _div(a, b):
    if _is(a, 0):
        return ZERO
    if _is(b, 1):
        return a
    return Div(a, b)


def _neg(a):
    if _is(a, 0):
        return ZERO
    return Neg(a)


def _chain_rule(fn: str, u: Expr) -> Expr:
    """d fn(u) / du as an expression in u."""
    if fn == "exp":
        return Call("exp", u)
    if fn == "log":
        return Div(ONE, u)
    if fn == "sin":
        return Call("cos", u)
    if fn == "cos":
        return Neg(Call("sin", u))
    if fn == "tan":
        c = Call("cos", u)
        return Div(ONE, Mul(c, c))
    if fn == "sqrt":
        return Div(ONE, Mul(TWO, Call("sqrt", u)))
    raise UnknownFunction(f"no derivative rule for {fn!r}")


def sym_diff(e: Expr, var: str, defs: Mapping[str, Def] | None = None) -> Expr:
    """Exact derivative of ``e`` with respect to ``var``.

    User functions are inlined first and ``D(g)(h)`` is replaced by the
    symbolic derivative of g's body evaluated at h, so the result only
    contains built-in calls.
    """
    return _d(expand(e, defs or {}), var)


def _d(e: Expr, var: str) -> Expr:
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == var else ZERO
    if isinstance(e, Add):
        return _add(_d(e.left, var), _d(e.right, var))
    if isinstance(e, Sub):
        return _sub(_d(e.left, var), _d(e.right, var))
    if isinstance(e, Mul):
        return _add(_mul(_d(e.left, var), e.right), _mul(e.left, _d(e.right, var)))
    if isinstance(e, Div):
        num = _sub(_mul(_d(e.left, var), e.right), _mul(e.left, _d(e.right, var)))
        return _div(num, Mul(e.right, e.right))
    if isinstance(e, Neg):
        return _neg(_d(e.operand, var))
    if isinstance(e, Pow):
        db = _d(e.base, var)
        if var not in free_vars(e.exponent):
            c = e.exponent
            lowered = Const(c.value - 1.0) if isinstance(c, Const) else Sub(c, ONE)
            if _is(lowered, 0):
                return _mul(c, db)
            return _mul(_mul(c, Pow(e.base, lowered)), db)
        # general a^b = exp(b log a)
        dc = _d(e.exponent, var)
        inner = _add(_mul(dc, Call("log", e.base)), _div(_mul(e.exponent, db), e.base))
        return _mul(e, inner)
    if isinstance(e, Call):
        return _mul(_chain_rule(e.fn, e.arg), _d(e.arg, var))
    if isinstance(e, DCall):
        raise TypeError("D(...) must be expanded before differentiation")
    raise TypeError(f"not an expression node: {e!r}")


def derivative_of_def(d: Def, defs: Mapping[str, Def]) -> Expr:
    """Symbolic dg/dparam of a user definition, in terms of its parameter."""
    return _d(expand(d.body, defs), d.param)


def expand(e: Expr, defs: Mapping[str, Def]) -> Expr:
    """Inline user calls and replace each ``D(g)(h)`` by g' evaluated at h."""
    if isinstance(e, (Const, Var)):
        return e
    if isinstance(e, (Add, Sub, Mul, Div)):
        return type(e)(expand(e.left, defs), expand(e.right, defs), e.pos)
    if isinstance(e, Pow):
        return Pow(expand(e.base, defs), expand(e.exponent, defs), e.pos)
    if isinstance(e, Neg):
        return Neg(expand(e.operand, defs), e.pos)
    if isinstance(e, Call):
        arg = expand(e.arg, defs)
        if e.fn in defs:
            d = defs[e.fn]
            return subst(expand(d.body, defs), d.param, arg)
        if e.fn not in REAL_FUNCTIONS:
            raise UnknownFunction(f"unknown function {e.fn!r}", e.pos)
        return Call(e.fn, arg, e.pos)
    if isinstance(e, DCall):
        d = _def(defs, e)
        return subst(derivative_of_def(d, defs), d.param, expand(e.arg, defs))
    raise TypeError(f"not an expression node: {e!r}")
