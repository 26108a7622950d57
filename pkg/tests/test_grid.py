import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sbrecon import fft, grid
from conftest import rel_adjoint_gap


def _pair(seed, n, shape_in, shape_out):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(shape_in) + 1j * rng.standard_normal(shape_in)
    b = rng.standard_normal(shape_out) + 1j * rng.standard_normal(shape_out)
    return a, b


@given(st.integers(0, 2**31 - 1), st.integers(2, 24))
def test_gradient_adjoint(seed, n):
    u, p = _pair(seed, n, (n, n), (2, n, n))
    lhs = np.vdot(grid.forward_gradient(u), p)
    rhs = np.vdot(u, grid.forward_gradient_adjoint(p))
    assert rel_adjoint_gap(lhs, rhs) < 1e-10


@given(st.integers(0, 2**31 - 1), st.integers(2, 24))
def test_sym_gradient_adjoint_weighted(seed, n):
    v, t = _pair(seed, n, (2, n, n), (3, n, n))
    e = grid.sym_gradient(v)
    # tensor inner product counts xy twice
    lhs = np.vdot(e[0], t[0]) + 2 * np.vdot(e[1], t[1]) + np.vdot(e[2], t[2])
    rhs = np.vdot(v, grid.sym_gradient_adjoint(t))
    assert rel_adjoint_gap(lhs, rhs) < 1e-10


def test_tensor_inner_matches_definition(rng):
    s = rng.standard_normal((3, 5, 5))
    t = rng.standard_normal((3, 5, 5))
    ref = np.sum(s[0] * t[0] + 2 * s[1] * t[1] + s[2] * t[2])
    assert grid.tensor_inner(s, t) == pytest.approx(ref, rel=1e-12)


def test_gradient_of_constant_is_zero():
    assert np.all(grid.forward_gradient(np.full((6, 6), 3.0)) == 0)


def test_gradient_of_ramp():
    n = 8
    u = np.tile(np.arange(n, dtype=float), (n, 1))
    g = grid.forward_gradient(u)
    assert np.all(g[0][:, :-1] == 1)
    assert np.all(g[0][:, -1] == -(n - 1))  # periodic wrap
    assert np.all(g[1] == 0)


@pytest.mark.parametrize("op", ["dx_forward", "dy_forward", "dx_backward", "dy_backward"])
def test_fourier_symbols(op, rng):
    n = 12
    u = rng.standard_normal((n, n))
    direct = fft.fft2(getattr(grid, op)(u))
    via_symbol = grid.fourier_symbol(op, n) * fft.fft2(u)
    np.testing.assert_allclose(direct, via_symbol, atol=1e-12)


def test_unknown_symbol():
    with pytest.raises(ValueError):
        grid.fourier_symbol("laplace", 8)


def test_norms_match_loops(rng):
    n = 5
    v = rng.standard_normal((2, n, n))
    t = rng.standard_normal((3, n, n))
    loop_v = sum(np.hypot(v[0, i, j], v[1, i, j]) for i in range(n) for j in range(n))
    loop_t = sum(
        np.sqrt(t[0, i, j] ** 2 + 2 * t[1, i, j] ** 2 + t[2, i, j] ** 2)
        for i in range(n)
        for j in range(n)
    )
    assert grid.vec_l1_norm(v) == pytest.approx(loop_v, rel=1e-12)
    assert grid.tensor_l1_norm(t) == pytest.approx(loop_t, rel=1e-12)


@pytest.mark.parametrize("bad", [np.zeros(4), np.zeros((3, 4)), np.zeros((1, 1))])
def test_check_image_rejects(bad):
    with pytest.raises(ValueError):
        grid.check_image(bad)


def test_stack_shape_checked():
    with pytest.raises(ValueError):
        grid.sym_gradient(np.zeros((3, 4, 4)))
