"""Tokenizer, recursive-descent parser and validator for the expression language.

Grammar::

    program := def* query
    def     := "def" IDENT "(" IDENT ")" "=" expr ";"
    query   := "eval" expr "at" binding ("," binding)* ";"
    binding := IDENT "=" ["-"] NUMBER
    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := atom ["^" unary]                  # right-associative
    atom    := NUMBER | IDENT | IDENT "(" expr ")"
             | "D" "(" IDENT ")" "(" expr ")" | "(" expr ")"

``pi`` and ``e`` are named constants wherever a number may appear.
``#`` starts a comment running to the end of the line.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import (
    ExprSyntaxError,
    NestingDepthError,
    RecursiveDefinition,
    UndefinedFunction,
    UndefinedVariable,
)
from .expr import Add, Call, Const, DCall, Def, Div, Mul, Neg, Pow, Program, Sub, Var, called, free_vars, walk
from .functions import registry

CONSTANTS = {"pi": math.pi, "e": math.e}
KEYWORDS = {"def", "eval", "at", "D"}

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),;=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "ident", "op", "eof"
    text: str
    pos: tuple[int, int]


def tokenize(source: str) -> list[Token]:
    tokens = []
    line, line_start, i = 1, 0, 0
    while i < len(source):
        m = _TOKEN.match(source, i)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {source[i]!r}", (line, i - line_start + 1))
        kind = m.lastgroup
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind != "ws":
            tokens.append(Token(kind, m.group(), (line, i - line_start + 1)))
        i = m.end()
    tokens.append(Token("eof", "", (line, i - line_start + 1)))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Token | None = None) -> ExprSyntaxError:
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return ExprSyntaxError(f"{msg}, found {found}", tok.pos)

    def accept(self, text: str) -> Token | None:
        if self.tok.kind in ("op", "ident") and self.tok.text == text:
            return self.advance()
        return None

    def expect(self, text: str) -> Token:
        t = self.accept(text)
        if t is None:
            raise self.error(f"expected {text!r}")
        return t

    def ident(self, what: str) -> Token:
        t = self.tok
        if t.kind != "ident":
            raise self.error(f"expected {what}")
        if t.text in KEYWORDS or t.text in CONSTANTS:
            raise self.error(f"expected {what}, {t.text!r} is reserved")
        return self.advance()

    def program(self) -> tuple[list[Def], object, dict[str, float]]:
        defs = []
        while self.tok.kind == "ident" and self.tok.text == "def":
            defs.append(self.definition())
        if not (self.tok.kind == "ident" and self.tok.text == "eval"):
            raise self.error("expected 'def' or 'eval'")
        self.advance()
        query = self.expr()
        self.expect("at")
        bindings: dict[str, float] = {}
        while True:
            name = self.ident("variable name")
            self.expect("=")
            if name.text in bindings:
                raise ExprSyntaxError(f"variable {name.text!r} bound twice", name.pos)
            bindings[name.text] = self.number()
            if not self.accept(","):
                break
        self.expect(";")
        if self.tok.kind != "eof":
            raise self.error("expected end of input after query")
        return defs, query, bindings

    def definition(self) -> Def:
        start = self.advance()
        name = self.ident("function name")
        self.expect("(")
        param = self.ident("parameter name")
        self.expect(")")
        self.expect("=")
        body = self.expr()
        self.expect(";")
        return Def(name.text, param.text, body, start.pos)

    def number(self) -> float:
        sign = -1.0 if self.accept("-") else 1.0
        t = self.tok
        if t.kind == "num":
            self.advance()
            return sign * _literal(t)
        if t.kind == "ident" and t.text in CONSTANTS:
            self.advance()
            return sign * CONSTANTS[t.text]
        raise self.error("expected a number")

    def expr(self):
        left = self.term()
        while self.tok.text in ("+", "-") and self.tok.kind == "op":
            op = self.advance()
            right = self.term()
            left = (Add if op.text == "+" else Sub)(left, right, op.pos)
        return left

    def term(self):
        left = self.unary()
        while self.tok.text in ("*", "/") and self.tok.kind == "op":
            op = self.advance()
            right = self.unary()
            left = (Mul if op.text == "*" else Div)(left, right, op.pos)
        return left

    def unary(self):
        op = self.accept("-")
        if op:
            return Neg(self.unary(), op.pos)
        return self.power()

    def power(self):
        base = self.atom()
        op = self.accept("^")
        if op:
            return Pow(base, self.unary(), op.pos)
        return base

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Const(_literal(t), t.pos)
        if t.kind == "op" and t.text == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "ident":
            if t.text in CONSTANTS:
                self.advance()
                return Const(CONSTANTS[t.text], t.pos)
            if t.text == "D":
                self.advance()
                self.expect("(")
                fn = self.ident("function name")
                self.expect(")")
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return DCall(fn.text, arg, t.pos)
            name = self.ident("expression")
            if self.accept("("):
                arg = self.expr()
                self.expect(")")
                return Call(name.text, arg, name.pos)
            return Var(name.text, name.pos)
        raise self.error("expected an expression")


def _literal(t: Token) -> float:
    v = float(t.text)
    if math.isinf(v):
        raise ExprSyntaxError(f"number {t.text} overflows a double", t.pos)
    return v


def parse(source: str) -> Program:
    """Parse and validate a program. Raises the errors from :mod:`nestad.errors`."""
    defs, query, bindings = _Parser(source).program()
    program = Program({d.name: d for d in defs}, query, bindings)
    if len(program.defs) != len(defs):
        seen = set()
        for d in defs:
            if d.name in seen:
                raise ExprSyntaxError(f"function {d.name!r} defined twice", d.pos)
            seen.add(d.name)
    validate(program, order=[d.name for d in defs])
    return program


def validate(p: Program, order: list[str] | None = None) -> None:
    builtins = registry()
    order = order if order is not None else list(p.defs)
    for d in p.defs.values():
        if d.name in builtins:
            raise ExprSyntaxError(f"cannot redefine built-in function {d.name!r}", d.pos)

    _check_cycles(p)

    seen: set[str] = set()
    for name in order:
        d = p.defs[name]
        extra = free_vars(d.body) - {d.param}
        if extra:
            raise UndefinedVariable(
                f"{sorted(extra)[0]!r} is not the parameter of {d.name!r}", _first_var(d.body, extra)
            )
        _check_calls(d.body, builtins, seen, p)
        seen.add(name)

    _check_calls(p.query, builtins, seen, p)
    missing = free_vars(p.query) - set(p.bindings)
    if missing:
        raise UndefinedVariable(f"variable {sorted(missing)[0]!r} is not bound", _first_var(p.query, missing))


def _check_cycles(p: Program) -> None:
    graph = {name: called(d.body) & set(p.defs) for name, d in p.defs.items()}
    state: dict[str, int] = {}

    def visit(n: str, stack: list[str]) -> None:
        state[n] = 1
        for m in sorted(graph[n]):
            if state.get(m) == 1:
                cycle = " -> ".join(stack[stack.index(m):] + [m]) if m in stack else f"{n} -> {m}"
                raise RecursiveDefinition(f"recursive definition: {cycle}", p.defs[m].pos)
            if m not in state:
                visit(m, stack + [m])
        state[n] = 2

    for n in p.defs:
        if n not in state:
            visit(n, [n])


def _check_calls(e, builtins, defined: set[str], p: Program) -> None:
    for node in walk(e):
        if isinstance(node, Call):
            if node.fn not in builtins and node.fn not in defined:
                if node.fn in p.defs:
                    raise UndefinedFunction(f"function {node.fn!r} used before its definition", node.pos)
                raise UndefinedFunction(f"undefined function {node.fn!r}", node.pos)
        elif isinstance(node, DCall):
            if node.fn in builtins:
                raise UndefinedFunction(
                    f"D() needs a user-defined function; wrap built-in {node.fn!r} in a def", node.pos
                )
            if node.fn not in defined:
                if node.fn in p.defs:
                    raise UndefinedFunction(f"function {node.fn!r} used before its definition", node.pos)
                raise UndefinedFunction(f"undefined function {node.fn!r}", node.pos)
            if _uses_dcall(node.fn, p, set()):
                raise NestingDepthError(
                    f"D({node.fn}) would nest derivatives more than one level deep", node.pos
                )


def _uses_dcall(name: str, p: Program, visiting: set[str]) -> bool:
    if name not in p.defs or name in visiting:
        return False
    visiting.add(name)
    for node in walk(p.defs[name].body):
        if isinstance(node, DCall):
            return True
        if isinstance(node, Call) and _uses_dcall(node.fn, p, visiting):
            return True
    return False


def _first_var(e, names: set[str]):
    for node in walk(e):
        if isinstance(node, Var) and node.name in names:
            return node.pos
    return None
