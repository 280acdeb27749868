import math

import pytest

from nestad.errors import DomainError, NonFinite, UnknownFunction, ZeroPrimal
from nestad.expr import Call, Const, Var
from nestad.oracle import FDConfig, eval_real, fd_first, fd_mixed, sym_diff
from nestad.parser import parse


def test_fd_first_examples():
    assert fd_first(lambda x: x * x, 3.0) == pytest.approx(6.0, abs=1e-6)
    assert fd_first(lambda x: x * x * math.cos(x), math.pi) == pytest.approx(-2 * math.pi, abs=1e-5)
    assert fd_first(math.exp, 0.0) == pytest.approx(1.0, abs=1e-6)


def test_fd_mixed_examples():
    assert fd_mixed(lambda x, y: x * y, 2.0, 3.0) == pytest.approx(1.0, abs=1e-4)
    assert fd_mixed(lambda x, y: x * x + y * y, 1.0, 1.0) == pytest.approx(0.0, abs=1e-4)
    # surrogate for the nested example: g(h(x) + y) with g(y) = exp(y^2), h(x) = x^3;
    # the mixed partial at y = 0 is the composite derivative 6x^2 e^{x^6}(1 + 2x^6)
    x = 0.5
    closed = 6 * x**2 * math.exp(x**6) * (1 + 2 * x**6)
    got = fd_mixed(lambda x, y: math.exp((x**3 + y) ** 2), x, 0.0)
    assert got == pytest.approx(closed, abs=1e-3)


def test_fd_nonfinite():
    with pytest.raises(NonFinite):
        fd_first(lambda x: math.inf, 1.0)
    with pytest.raises(NonFinite):
        fd_mixed(lambda x, y: math.nan, 1.0, 1.0)


def test_fd_config():
    cfg = FDConfig()
    assert cfg.first_step(0.0) == pytest.approx(2.220446049250313e-16 ** (1 / 3))
    assert cfg.first_step(100.0) == pytest.approx(100 * 2.220446049250313e-16 ** (1 / 3))
    assert cfg.second_step(-4.0) == pytest.approx(4 * 2.220446049250313e-16**0.25)
    assert FDConfig(step=1e-3).first_step(1e9) == 1e-3
    with pytest.raises(ValueError):
        FDConfig(step=0.0)
    with pytest.raises(ValueError):
        FDConfig(rel_tol=-1)


def _query(src):
    p = parse(src)
    return p, p.query


def test_sym_diff_examples():
    p, q = _query("eval x^2 at x = 3;")
    assert eval_real(sym_diff(q, "x"), {"x": 3.0}) == 6.0
    assert sym_diff(Const(4.0), "x") == Const(0.0)
    assert sym_diff(Var("y"), "x") == Const(0.0)


def test_sym_diff_nested_example():
    p = parse("def g(y) = exp(y^2); eval D(g)(x^3) at x = 0.5;")
    d = sym_diff(p.query, "x", p.defs)
    for x in (0.1, 0.5, 0.9, 1.1):
        closed = 6 * x**2 * math.exp(x**6) * (1 + 2 * x**6)
        assert eval_real(d, {"x": x}) == pytest.approx(closed, rel=1e-13)


@pytest.mark.parametrize(
    "src,x",
    [
        ("eval sin(x)*cos(x) at x = 0.3;", 0.3),
        ("eval tan(x) / x at x = 0.7;", 0.7),
        ("eval sqrt(x) + log(x) at x = 2;", 2.0),
        ("eval exp(-x^2) at x = 0.4;", 0.4),
        ("eval x^x at x = 1.5;", 1.5),
        ("eval x^2.5 at x = 1.5;", 1.5),
        ("eval 2^x at x = 1.5;", 1.5),
        ("eval -x^3 at x = 1.5;", 1.5),
        ("def f(t) = t*sin(t); eval f(x^2) at x = 0.8;", 0.8),
    ],
)
def test_sym_matches_fd(src, x):
    p = parse(src)
    d = sym_diff(p.query, "x", p.defs)
    sym = eval_real(d, {"x": x}, p.defs)
    fd = fd_first(lambda t: eval_real(p.query, {"x": t}, p.defs), x)
    assert abs(sym - fd) <= max(1e-6, 1e-5 * abs(fd))


def test_eval_real_dcall_modes():
    p = parse("def g(y) = sin(y)*y; eval D(g)(x) at x = 1.2;")
    sym = eval_real(p.query, {"x": 1.2}, p.defs, dcall="symbolic")
    fd = eval_real(p.query, {"x": 1.2}, p.defs, dcall="fd")
    assert sym == pytest.approx(math.cos(1.2) * 1.2 + math.sin(1.2), rel=1e-14)
    assert fd == pytest.approx(sym, rel=1e-7)


def test_eval_real_errors():
    with pytest.raises(ZeroPrimal):
        eval_real(parse("eval 1/(x-1) at x = 1;").query, {"x": 1.0})
    with pytest.raises(DomainError):
        eval_real(parse("eval log(x) at x = -1;").query, {"x": -1.0})
    with pytest.raises(DomainError):
        eval_real(parse("eval x^0.5 at x = -1;").query, {"x": -1.0})
    with pytest.raises(UnknownFunction):
        sym_diff(Call("nope", Var("x")), "x")
