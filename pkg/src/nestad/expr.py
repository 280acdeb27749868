"""AST of the expression language, plus printing and small tree utilities.

Node positions are (line, column) pairs kept out of equality so that a
printed-then-reparsed tree compares equal to the original.
"""

from __future__ import annotations

from dataclasses import dataclass, field

Pos = tuple[int, int] | None


def _pos():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Const:
    value: float
    pos: Pos = _pos()


@dataclass(frozen=True)
class Var:
    name: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Div:
    left: "Expr"
    right: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Neg:
    operand: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class DCall:
    """``D(fn)(arg)``: derivative of user function ``fn`` evaluated at ``arg``."""

    fn: str
    arg: "Expr"
    pos: Pos = _pos()


Expr = Const | Var | Add | Sub | Mul | Div | Neg | Pow | Call | DCall
BINARY = (Add, Sub, Mul, Div)


@dataclass(frozen=True)
class Def:
    name: str
    param: str
    body: Expr
    pos: Pos = _pos()


@dataclass(frozen=True)
class Program:
    defs: dict[str, Def]
    query: Expr
    bindings: dict[str, float]

    def __eq__(self, other):
        if not isinstance(other, Program):
            return NotImplemented
        return (
            list(self.defs.items()) == list(other.defs.items())
            and self.query == other.query
            and list(self.bindings.items()) == list(other.bindings.items())
        )

    __hash__ = None


_OPS = {Add: "+", Sub: "-", Mul: "*", Div: "/"}


def to_source(e: Expr) -> str:
    """Print an expression so that parsing it back gives the same tree.

    Compound operands are always parenthesised; no attempt at minimal output.
    """
    if isinstance(e, Const):
        if e.value < 0 or e.value != e.value:
            raise ValueError(f"cannot print literal {e.value!r}")
        return repr(float(e.value))
    if isinstance(e, Var):
        return e.name
    if isinstance(e, BINARY):
        return f"{_wrap(e.left)} {_OPS[type(e)]} {_wrap(e.right)}"
    if isinstance(e, Neg):
        return f"-{_wrap(e.operand)}"
    if isinstance(e, Pow):
        return f"{_wrap(e.base)}^{_wrap(e.exponent)}"
    if isinstance(e, Call):
        return f"{e.fn}({to_source(e.arg)})"
    if isinstance(e, DCall):
        return f"D({e.fn})({to_source(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


def _wrap(e: Expr) -> str:
    s = to_source(e)
    if isinstance(e, (Const, Var, Call, DCall)):
        return s
    return f"({s})"


def program_source(p: Program) -> str:
    lines = [f"def {d.name}({d.param}) = {to_source(d.body)};" for d in p.defs.values()]
    binds = ", ".join(f"{k} = {v!r}" for k, v in p.bindings.items())
    lines.append(f"eval {to_source(p.query)} at {binds};")
    return "\n".join(lines) + "\n"


def children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, BINARY):
        return (e.left, e.right)
    if isinstance(e, Pow):
        return (e.base, e.exponent)
    if isinstance(e, Neg):
        return (e.operand,)
    if isinstance(e, (Call, DCall)):
        return (e.arg,)
    return ()


def walk(e: Expr):
    yield e
    for c in children(e):
        yield from walk(c)


def free_vars(e: Expr) -> set[str]:
    return {n.name for n in walk(e) if isinstance(n, Var)}


def called(e: Expr) -> set[str]:
    """Names used in Call or DCall position."""
    return {n.fn for n in walk(e) if isinstance(n, (Call, DCall))}


def subst(e: Expr, name: str, value: Expr) -> Expr:
    """Replace every ``Var(name)`` in ``e`` by ``value``."""
    if isinstance(e, Var):
        return value if e.name == name else e
    if isinstance(e, Const):
        return e
    if isinstance(e, BINARY):
        return type(e)(subst(e.left, name, value), subst(e.right, name, value), e.pos)
    if isinstance(e, Pow):
        return Pow(subst(e.base, name, value), subst(e.exponent, name, value), e.pos)
    if isinstance(e, Neg):
        return Neg(subst(e.operand, name, value), e.pos)
    if isinstance(e, (Call, DCall)):
        return type(e)(e.fn, subst(e.arg, name, value), e.pos)
    raise TypeError(f"not an expression node: {e!r}")
