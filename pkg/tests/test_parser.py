import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nestad.errors import (
    ExprSyntaxError,
    NestingDepthError,
    RecursiveDefinition,
    UndefinedFunction,
    UndefinedVariable,
)
from nestad.expr import Add, Call, Const, DCall, Def, Div, Mul, Neg, Pow, Program, Sub, Var, program_source, walk
from nestad.parser import parse, tokenize


def test_nested_program():
    p = parse("def g(y) = exp(y^2); eval x^2 + D(g)(x^3) at x = 0.5;")
    assert list(p.defs) == ["g"]
    assert p.defs["g"] == Def("g", "y", Call("exp", Pow(Var("y"), Const(2.0))))
    assert p.query == Add(Pow(Var("x"), Const(2.0)), DCall("g", Pow(Var("x"), Const(3.0))))
    assert p.bindings == {"x": 0.5}


def test_two_variable_program():
    p = parse("eval x*y + sin(x) at x = 3.14159265358979, y = 2;")
    assert p.defs == {}
    assert p.query == Add(Mul(Var("x"), Var("y")), Call("sin", Var("x")))
    assert p.bindings == {"x": 3.14159265358979, "y": 2.0}


def test_undefined_dcall_target():
    with pytest.raises(UndefinedFunction):
        parse("eval D(g)(x) at x = 1;")


def test_precedence_and_associativity():
    q = parse("eval -x^2 at x = 1;").query
    assert q == Neg(Pow(Var("x"), Const(2.0)))
    q = parse("eval x^y^2 at x = 1, y = 1;").query
    assert q == Pow(Var("x"), Pow(Var("y"), Const(2.0)))
    q = parse("eval x - y - 1 at x = 1, y = 1;").query
    assert q == Sub(Sub(Var("x"), Var("y")), Const(1.0))
    q = parse("eval x / y * 2 at x = 1, y = 1;").query
    assert q == Mul(Div(Var("x"), Var("y")), Const(2.0))
    q = parse("eval x^-1 at x = 2;").query
    assert q == Pow(Var("x"), Neg(Const(1.0)))
    q = parse("eval 2*(x + 1) at x = 2;").query
    assert q == Mul(Const(2.0), Add(Var("x"), Const(1.0)))


def test_named_constants_and_comments():
    p = parse("# header\neval x * pi + e at x = pi; # trailing\n")
    assert p.query == Add(Mul(Var("x"), Const(math.pi)), Const(math.e))
    assert p.bindings == {"x": math.pi}
    assert parse("eval x at x = -e;").bindings == {"x": -math.e}
    assert parse("eval x at x = 1.5e-3;").bindings == {"x": 1.5e-3}


@pytest.mark.parametrize(
    "src,line,col",
    [
        ("eval x + at x = 1;", 1, 10),
        ("eval x at x = 1", 1, 16),
        ("def f(y) = y;\neval f(x) at x = ;", 2, 18),
        ("eval x $ 2 at x = 1;", 1, 8),
        ("eval x at x = 1, x = 2;", 1, 18),
        ("eval x at x = 1; eval x at x = 1;", 1, 18),
        ("def (y) = y; eval 1 at x = 1;", 1, 5),
        ("eval pi(x) at x = 1;", 1, 8),
        ("eval x at x = 1e999;", 1, 15),
    ],
)
def test_syntax_errors_report_location(src, line, col):
    with pytest.raises(ExprSyntaxError) as info:
        parse(src)
    assert info.value.location == (line, col)
    assert f"line {line}, column {col}" in str(info.value)


def test_validation_errors():
    with pytest.raises(UndefinedFunction):
        parse("eval foo(x) at x = 1;")
    with pytest.raises(UndefinedFunction, match="built-in"):
        parse("eval D(sin)(x) at x = 1;")
    with pytest.raises(UndefinedVariable) as info:
        parse("eval x + z at x = 1;")
    assert info.value.location == (1, 10)
    with pytest.raises(UndefinedVariable):
        parse("def f(y) = y + x; eval f(x) at x = 1;")
    with pytest.raises(RecursiveDefinition):
        parse("def f(y) = f(y) + 1; eval f(x) at x = 1;")
    with pytest.raises(RecursiveDefinition):
        parse("def f(y) = g(y); def g(y) = f(y); eval f(x) at x = 1;")
    with pytest.raises(UndefinedFunction, match="before its definition"):
        parse("def f(y) = g(y); def g(y) = y; eval f(x) at x = 1;")
    with pytest.raises(ExprSyntaxError, match="defined twice"):
        parse("def f(y) = y; def f(y) = 2*y; eval f(x) at x = 1;")
    with pytest.raises(ExprSyntaxError, match="built-in"):
        parse("def sin(y) = y; eval sin(x) at x = 1;")


def test_nesting_depth_rejected():
    with pytest.raises(NestingDepthError):
        parse("def g(y) = y^2; def k(y) = D(g)(y); eval D(k)(x) at x = 1;")
    with pytest.raises(NestingDepthError):
        parse("def g(y) = y^2; def k(y) = D(g)(y); def m(y) = k(y) + 1; eval D(m)(x) at x = 1;")
    # one level through a plain call is fine
    parse("def g(y) = y^2; def k(y) = D(g)(y) + 1; eval k(x) at x = 1;")
    # D(...) inside the argument of D(...) is evaluated at the outer level
    parse("def g(y) = y^2; eval D(g)(D(g)(x)) at x = 1;")


def test_tokenizer_positions():
    toks = tokenize("eval\n  x at x=1;")
    assert [(t.text, t.pos) for t in toks[:3]] == [("eval", (1, 1)), ("x", (2, 3)), ("at", (2, 5))]
    assert toks[-1].kind == "eof"


# round trip

names = st.sampled_from(["x", "y"])
funcs = st.sampled_from(["exp", "log", "sin", "cos", "tan", "sqrt", "g"])
literals = st.floats(0, 1e20, allow_nan=False, allow_infinity=False)


def _exprs(leaves):
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            st.builds(Add, sub, sub),
            st.builds(Sub, sub, sub),
            st.builds(Mul, sub, sub),
            st.builds(Div, sub, sub),
            st.builds(Neg, sub),
            st.builds(Pow, sub, sub),
            st.builds(Call, funcs, sub),
            st.builds(DCall, st.just("g"), sub),
        ),
        max_leaves=12,
    )


query_exprs = _exprs(st.one_of(st.builds(Const, literals), st.builds(Var, names)))
body_exprs = _exprs(st.one_of(st.builds(Const, literals), st.just(Var("t")))).filter(
    lambda e: not any(isinstance(n, DCall) or (isinstance(n, Call) and n.fn == "g") for n in walk(e))
)


@settings(max_examples=300, deadline=None)
@given(query_exprs, body_exprs, st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_print_parse_round_trip(query, body, x, y):
    p = Program({"g": Def("g", "t", body)}, query, {"x": x, "y": y})
    src = program_source(p)
    assert parse(src) == p
    assert program_source(parse(src)) == src
