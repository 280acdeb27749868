"""Forward-mode automatic differentiation with dual and nested dual numbers."""

from .dual import (
    Dual,
    dual_add,
    dual_div,
    dual_inv,
    dual_isclose,
    dual_mul,
    dual_neg,
    dual_scale,
    dual_sub,
    dual_variable,
    lift_real,
    unit_dual,
)
from .errors import (
    DomainError,
    ExprSyntaxError,
    NestadError,
    NestingDepthError,
    NonFinite,
    RecursiveDefinition,
    UndefinedFunction,
    UndefinedVariable,
    UnknownFunction,
    ZeroPrimal,
)
from .evaluate import EvalReport, evaluate, report
from .functions import AnalyticFn, lift, lift_dual, lift_nested, lookup, pow_int, power, registry
from .nested import (
    NestedDual,
    embed_dual,
    embed_real,
    epsilon_units,
    phi,
    phi_inv,
    popD,
    popV,
    push,
    sa_add,
    sa_div,
    sa_inv,
    sa_isclose,
    sa_mul,
    sa_neg,
    sa_scale,
    sa_sub,
)
from .parser import parse

__version__ = "0.1.0"


def derivative(f, x: float) -> float:
    """df/dx at ``x`` for a Python callable built from Dual-aware operations."""
    return f(dual_variable(x)).der


def nested_derivative(g, h_value: Dual) -> Dual:
    """``popD(g(push(h)))``: (dg/dy at y = h, its derivative along the outer variable)."""
    return popD(g(push(h_value)))
