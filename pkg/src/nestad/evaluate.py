"""Evaluate programs with dual numbers and report value and derivatives.

One forward pass per bound variable: that variable is seeded with
tangent 1, every other binding is a constant.  ``D(g)(h)`` is computed by
the nesting protocol: evaluate h over duals, ``push`` it, run g's body
over nested duals, ``popD`` the result and continue with that dual.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

from . import oracle
from .dual import Dual, dual_variable, lift_real
from .errors import NestadError, NestingDepthError
from .expr import Add, Call, Const, DCall, Div, Expr, Mul, Neg, Pow, Program, Sub, Var, children, free_vars, subst
from .functions import EXP, LOG, lift, lookup, pow_int, power, registry
from .nested import NestedDual, embed_real, popD, popV, push


@dataclass
class NestedDiag:
    """What one evaluation of ``D(fn)(h)`` produced.

    ``original_derivative`` and ``composite_derivative`` are keyed by the
    seeded variable, like the outer derivatives.
    """

    fn: str
    value: float
    nested_derivative: float
    original_derivative: dict[str, float] = field(default_factory=dict)
    composite_derivative: dict[str, float] = field(default_factory=dict)
    # argument h rewritten in terms of query variables; used by the oracle check
    arg: Expr | None = field(default=None, repr=False, compare=False)


@dataclass
class EvalReport:
    value: float
    derivatives: dict[str, float]
    nested: list[NestedDiag] = field(default_factory=list)
    check: dict[str, Any] | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": self.value,
            "derivatives": dict(self.derivatives),
            "nested": [
                {
                    "fn": d.fn,
                    "value": d.value,
                    "original_derivative": dict(d.original_derivative),
                    "nested_derivative": d.nested_derivative,
                    "composite_derivative": dict(d.composite_derivative),
                }
                for d in self.nested
            ],
            "check": self.check,
        }


def _primal(v) -> float:
    return v.val.val if isinstance(v, NestedDual) else v.val


class _Pass:
    """A single seeded forward pass over a program."""

    def __init__(self, program: Program):
        self.program = program
        self.builtins = registry()
        self.trace: list[tuple[str, NestedDual, Expr]] = []

    def run(self, env: dict[str, Dual]) -> Dual:
        return self.eval(self.program.query, env, None, nested=False)

    def eval(self, e: Expr, env, scope, nested: bool):
        # scope: None at query level, else (param, query-level expr bound to it)
        try:
            return self._eval(e, env, scope, nested)
        except NestadError as exc:
            raise exc.at(e.pos)

    def _eval(self, e: Expr, env, scope, nested: bool):
        if isinstance(e, Const):
            return embed_real(e.value) if nested else lift_real(e.value)
        if isinstance(e, Var):
            return env[e.name]
        if isinstance(e, Add):
            return self.eval(e.left, env, scope, nested) + self.eval(e.right, env, scope, nested)
        if isinstance(e, Sub):
            return self.eval(e.left, env, scope, nested) - self.eval(e.right, env, scope, nested)
        if isinstance(e, Mul):
            return self.eval(e.left, env, scope, nested) * self.eval(e.right, env, scope, nested)
        if isinstance(e, Div):
            return self.eval(e.left, env, scope, nested) / self.eval(e.right, env, scope, nested)
        if isinstance(e, Neg):
            return -self.eval(e.operand, env, scope, nested)
        if isinstance(e, Pow):
            return self._pow(e, env, scope, nested)
        if isinstance(e, Call):
            arg = self.eval(e.arg, env, scope, nested)
            if e.fn in self.builtins:
                return lift(lookup(e.fn), arg)
            d = self.program.defs[e.fn]
            return self.eval(d.body, {d.param: arg}, (d.param, _in_query_terms(e.arg, scope)), nested)
        if isinstance(e, DCall):
            if nested:
                raise NestingDepthError("D(...) inside a nested evaluation is not supported", e.pos)
            h = self.eval(e.arg, env, scope, nested)
            d = self.program.defs[e.fn]
            X = push(h)
            Y = self.eval(d.body, {d.param: X}, None, nested=True)
            self.trace.append((e.fn, Y, _in_query_terms(e.arg, scope)))
            return popD(Y)
        raise TypeError(f"not an expression node: {e!r}")

    def _pow(self, e: Pow, env, scope, nested: bool):
        base = self.eval(e.base, env, scope, nested)
        if not free_vars(e.exponent):
            c = _primal(self.eval(e.exponent, env, scope, nested))
            if c.is_integer() and abs(c) <= 2**31:
                return pow_int(base, int(c))
            return lift(power(c), base)
        exponent = self.eval(e.exponent, env, scope, nested)
        return lift(EXP, exponent * lift(LOG, base))


def _in_query_terms(arg: Expr, scope) -> Expr:
    if scope is None:
        return arg
    param, bound = scope
    return subst(arg, param, bound)


def evaluate(program: Program) -> EvalReport:
    """Value and per-variable derivatives of the program's query."""
    value = math.nan
    derivatives: dict[str, float] = {}
    diags: list[NestedDiag] = []
    for i, var in enumerate(program.bindings):
        env = {
            name: dual_variable(x) if name == var else lift_real(x)
            for name, x in program.bindings.items()
        }
        run = _Pass(program)
        out = run.run(env)
        derivatives[var] = out.der
        if i == 0:
            value = out.val
            diags = [
                NestedDiag(fn, popV(Y).val, popD(Y).val, arg=arg) for fn, Y, arg in run.trace
            ]
        for diag, (_, Y, _) in zip(diags, run.trace):
            diag.original_derivative[var] = popV(Y).der
            diag.composite_derivative[var] = popD(Y).der
    return EvalReport(value, derivatives, diags)


def _json_safe(obj):
    # strict JSON has no NaN/Infinity literals; write them as strings
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else repr(obj)
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_json_safe(v) for v in obj]
    return obj


def report(r: EvalReport, format: str = "text", precision: int = 17) -> str:
    if format == "json":
        return json.dumps(_json_safe(r.to_dict()), indent=2) + "\n"
    if format != "text":
        raise ValueError(f"unknown format {format!r}")

    def num(v: float) -> str:
        return f"{v:.{precision}g}"

    lines = [f"value = {num(r.value)}"]
    lines += [f"d/d{var} = {num(v)}" for var, v in r.derivatives.items()]
    for i, d in enumerate(r.nested):
        lines.append(f"D({d.fn})#{i}: value = {num(d.value)}, nested derivative = {num(d.nested_derivative)}")
        for var, v in d.composite_derivative.items():
            lines.append(f"D({d.fn})#{i}: composite d/d{var} = {num(v)}")
    if r.check is not None:
        for var, c in r.check["derivatives"].items():
            lines.append(
                f"check d/d{var}: symbolic delta = {num(c['symbolic_delta'])}, fd delta = {num(c['fd_delta'])}"
                f" [{'ok' if c['ok'] else 'FAIL'}]"
            )
        for i, c in enumerate(r.check["nested"]):
            for var, cc in c["composite"].items():
                lines.append(
                    f"check D#{i} composite d/d{var}: symbolic delta = {num(cc['symbolic_delta'])},"
                    f" mixed fd delta = {num(cc['fd_delta'])} [{'ok' if cc['ok'] else 'FAIL'}]"
                )
        lines.append(f"check: {'passed' if r.check['passed'] else 'FAILED'}")
    return "\n".join(lines) + "\n"


# oracle cross-check

SYMBOLIC_REL_TOL = 1e-9
SYMBOLIC_ABS_TOL = 1e-12


def _sym_ok(value: float, reference: float) -> bool:
    return math.isclose(value, reference, rel_tol=SYMBOLIC_REL_TOL, abs_tol=SYMBOLIC_ABS_TOL)


def _has_dcall(e: Expr, program: Program) -> bool:
    """True if evaluating ``e`` reaches a D(...) call, following user calls."""
    stack, seen = [e], set()
    while stack:
        node = stack.pop()
        if isinstance(node, DCall):
            return True
        if isinstance(node, Call) and node.fn in program.defs and node.fn not in seen:
            seen.add(node.fn)
            stack.append(program.defs[node.fn].body)
        stack.extend(children(node))
    return False


def check(program: Program, r: EvalReport, cfg: oracle.FDConfig = oracle.DEFAULT_FD) -> dict[str, Any]:
    """Compare AD results with the symbolic and finite-difference oracles.

    Outer derivatives of queries containing ``D(...)`` are checked against
    a nested finite difference, at ``cfg.nested_rel_tol``.
    """
    defs = program.defs
    point = dict(program.bindings)
    nested_fd = _has_dcall(program.query, program)
    out: dict[str, Any] = {"derivatives": {}, "nested": [], "passed": True}

    def along(expr: Expr, var: str, dcall: str):
        def f(t: float) -> float:
            return oracle.eval_real(expr, {**point, var: t}, defs, dcall=dcall, cfg=cfg)

        return f

    for var, ad in r.derivatives.items():
        sym = oracle.eval_real(oracle.sym_diff(program.query, var, defs), point, defs)
        fd = oracle.fd_first(along(program.query, var, "fd"), point[var], cfg)
        fd_ok = (
            abs(ad - fd) <= max(cfg.abs_tol, cfg.nested_rel_tol * abs(fd))
            if nested_fd
            else cfg.agrees(ad, fd)
        )
        ok = _sym_ok(ad, sym) and fd_ok
        out["derivatives"][var] = {
            "symbolic": sym,
            "symbolic_delta": ad - sym,
            "fd": fd,
            "fd_delta": ad - fd,
            "ok": ok,
        }
        out["passed"] &= ok

    for d in r.nested:
        g = defs[d.fn]
        h = d.arg
        body = lambda y, g=g: oracle.eval_real(g.body, {g.param: y}, defs)
        h0 = oracle.eval_real(h, point, defs)
        entry: dict[str, Any] = {"fn": d.fn, "composite": {}}
        sym_nested = oracle.eval_real(oracle.derivative_of_def(g, defs), {g.param: h0}, defs)
        entry["nested_symbolic_delta"] = d.nested_derivative - sym_nested
        entry["nested_ok"] = _sym_ok(d.nested_derivative, sym_nested)
        out["passed"] &= entry["nested_ok"]
        for var, ad in d.composite_derivative.items():
            sym = oracle.eval_real(oracle.sym_diff(DCall(d.fn, h), var, defs), point, defs)
            hv = along(h, var, "symbolic")
            fd = oracle.fd_mixed(lambda x, y: body(hv(x) + y), point[var], 0.0, cfg)
            ok = _sym_ok(ad, sym) and abs(ad - fd) <= max(cfg.nested_rel_tol, cfg.nested_rel_tol * abs(fd))
            entry["composite"][var] = {
                "symbolic": sym,
                "symbolic_delta": ad - sym,
                "fd": fd,
                "fd_delta": ad - fd,
                "ok": ok,
            }
            out["passed"] &= ok
        out["nested"].append(entry)
    out["passed"] = bool(out["passed"])
    return out
