import numpy as np
import pytest

from nestad import _kernels, batch
from nestad.dual import Dual, dual_inv, dual_mul
from nestad.errors import DomainError, ZeroPrimal
from nestad.functions import LOG, lift_dual, lift_nested, lookup, registry
from nestad.nested import NestedDual, sa_div, sa_inv, sa_mul

BACKENDS = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def _duals(rng, n):
    a = rng.uniform(-10, 10, (n, 2))
    a[:, 0] = np.where(np.abs(a[:, 0]) < 1e-3, 1.0, a[:, 0])
    return a


def _nested(rng, n):
    a = rng.uniform(-10, 10, (n, 4))
    a[:, 0] = np.where(np.abs(a[:, 0]) < 1e-3, 1.0, a[:, 0])
    return a


def test_dual_kernels_match_scalar(rng, backend):
    a, b = _duals(rng, 500), _duals(rng, 500)
    mul = batch.dual_mul(a, b, backend)
    inv = batch.dual_inv(a, backend)
    for i in range(len(a)):
        x, y = Dual(*a[i]), Dual(*b[i])
        assert tuple(mul[i]) == dual_mul(x, y).as_tuple()
        assert tuple(inv[i]) == dual_inv(x).as_tuple()


def test_nested_kernels_match_scalar(rng, backend):
    a, b = _nested(rng, 500), _nested(rng, 500)
    mul = batch.nested_mul(a, b, backend)
    inv = batch.nested_inv(a, backend)
    div = batch.nested_div(a, b, backend)
    for i in range(len(a)):
        x, y = NestedDual.from_tuple(a[i]), NestedDual.from_tuple(b[i])
        # flat formula vs pair-of-duals route: same terms, different grouping in the last slot
        np.testing.assert_allclose(mul[i], sa_mul(x, y).as_tuple(), rtol=1e-13, atol=1e-12)
        assert tuple(inv[i]) == sa_inv(x).as_tuple()
        np.testing.assert_allclose(div[i], sa_div(x, y).as_tuple(), rtol=1e-12, atol=1e-11)


@pytest.mark.parametrize("name", sorted(registry()))
def test_lift_kernels_match_scalar(rng, backend, name):
    fn = lookup(name)
    lo = 0.1 if name in ("log", "sqrt") else -1.2
    a = rng.uniform(lo, 1.2, (200, 4))
    d = batch.dual_lift(fn, a[:, :2], backend)
    s = batch.nested_lift(fn, a, backend)
    for i in range(len(a)):
        np.testing.assert_allclose(d[i], lift_dual(fn, Dual(*a[i, :2])).as_tuple(), rtol=1e-14)
        np.testing.assert_allclose(s[i], lift_nested(fn, NestedDual.from_tuple(a[i])).as_tuple(), rtol=1e-14)


def test_backends_agree_bitwise(rng):
    if not _kernels.HAVE_NUMBA:
        pytest.skip("numba not installed")
    a, b = _nested(rng, 1000), _nested(rng, 1000)
    a2, b2 = np.ascontiguousarray(a[:, :2]), np.ascontiguousarray(b[:, :2])
    pairs = [
        ("nested_mul", (a, b)),
        ("nested_inv", (a,)),
        ("dual_mul", (a2, b2)),
        ("dual_inv", (a2,)),
    ]
    for name, args in pairs:
        np.testing.assert_array_equal(_kernels.NUMPY[name](*args), _kernels.NUMBA[name](*args))


def test_errors(backend):
    with pytest.raises(ZeroPrimal):
        batch.nested_inv([[1, 0, 0, 0], [0, 1, 1, 1]], backend)
    with pytest.raises(ZeroPrimal):
        batch.dual_div([[1, 0]], [[0, 2]], backend)
    with pytest.raises(DomainError):
        batch.nested_lift(LOG, [[1, 0, 0, 0], [-1, 0, 0, 0]], backend)
    with pytest.raises(ValueError):
        batch.nested_mul(np.zeros((3, 2)), np.zeros((3, 2)), backend)


def test_unknown_backend():
    with pytest.raises(ValueError):
        batch.dual_mul([[1, 0]], [[1, 0]], "fortran")


@pytest.mark.parametrize("flag,expected", [("1", "numpy"), ("0", "numba" if _kernels.HAVE_NUMBA else "numpy")])
def test_env_flag_selects_backend(flag, expected):
    import os
    import subprocess
    import sys

    code = "from nestad import _kernels as k; print('numba' if k.backend() is k.NUMBA else 'numpy')"
    env = {**os.environ, "NESTAD_DISABLE_NUMBA": flag}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == expected
