import numpy as np
import pytest

from sbrecon.grid import forward_gradient, sym_gradient
from sbrecon.linsolve import (
    BlockSystemSpectra,
    RightHandSide,
    assemble_spectra,
    block_residual,
    build_rhs,
    solve_diagonal,
    solve_triangular_cg,
)
from sbrecon.sampling import fourier_operator, inpainting_operator, make_radial_mask, radon_operator
from sbrecon.solver import SolverConfig, init_state
from sbrecon.transforms import build_wavelet

N = 8
CFG = SolverConfig(mu1=3.0, mu2=2.0, mu3=5.0, beta=7.0)


def dense(fn, shape_in):
    size = int(np.prod(shape_in))
    cols = [np.asarray(fn(e.reshape(shape_in))).reshape(-1) for e in np.eye(size)]
    return np.column_stack(cols)


def cnormal(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_state(A, t, rng, cfg=CFG):
    st = init_state(A, t, np.zeros(A.m), cfg, real=False)
    for name in ("w", "bw", "d", "bd", "t", "bt"):
        setattr(st, name, cnormal(rng, getattr(st, name).shape))
    st.y = cnormal(rng, A.m)
    st.yk = cnormal(rng, A.m)
    return st


def dense_system(A, t, st, cfg=CFG):
    """Normal equations of the quadratic (u, v) energy, assembled column by column."""
    n2 = N * N
    Am = dense(A.forward, (N, N))
    Pm = dense(t.analyze_array, (N, N))
    G = dense(forward_gradient, (N, N))
    E = dense(sym_gradient, (2, N, N))
    Mw = np.diag(np.repeat([1.0, 2.0, 1.0], n2))
    H = lambda m: m.conj().T  # noqa: E731
    top = cfg.beta * H(Am) @ Am + cfg.mu1 * H(Pm) @ Pm + cfg.mu2 * H(G) @ G
    M = np.block([
        [top, -cfg.mu2 * H(G)],
        [-cfg.mu2 * G, cfg.mu2 * np.eye(2 * n2) + cfg.mu3 * E.T @ Mw @ E],
    ])
    r_top = (cfg.beta * H(Am) @ (st.y + st.yk) + cfg.mu1 * H(Pm) @ (st.w - st.bw).ravel()
             + cfg.mu2 * H(G) @ (st.d - st.bd).ravel())
    r_bot = cfg.mu2 * (st.bd - st.d).ravel() + cfg.mu3 * E.T @ Mw @ (st.t - st.bt).ravel()
    return M, np.concatenate([r_top, r_bot])


def stacked(u, v):
    return np.concatenate([u.ravel(), v.ravel()])


@pytest.fixture(scope="module")
def fourier_setup():
    return fourier_operator(make_radial_mask(N, 3)), build_wavelet(N, 2, "haar")


@pytest.fixture(scope="module")
def radon_setup():
    return radon_operator(N, 5), build_wavelet(N, 2, "haar")


def test_rhs_matches_dense(fourier_setup, rng):
    A, t = fourier_setup
    st = random_state(A, t, rng)
    _, rhs = dense_system(A, t, st)
    r = build_rhs(st, CFG, t, A)
    got = np.concatenate([r.R1.ravel(), r.R2.ravel(), r.R3.ravel()])
    assert np.max(np.abs(got - rhs)) / np.max(np.abs(rhs)) < 1e-10


def test_zero_state_gives_zero_rhs(fourier_setup):
    A, t = fourier_setup
    st = init_state(A, t, np.zeros(A.m), CFG, real=True)
    r = build_rhs(st, CFG, t, A)
    assert not r.R1.any() and not r.R2.any() and not r.R3.any()


def test_spectra_diagonalize_dense_blocks(fourier_setup):
    A, t = fourier_setup
    spec = assemble_spectra(CFG, t, A)
    F = dense(lambda u: np.fft.fft2(u, norm="ortho"), (N, N))
    Am = dense(A.forward, (N, N))
    Pm = dense(t.analyze_array, (N, N))
    G = dense(forward_gradient, (N, N))
    b1 = CFG.beta * Am.conj().T @ Am + CFG.mu1 * Pm.conj().T @ Pm + CFG.mu2 * G.conj().T @ G
    np.testing.assert_allclose(F @ b1 @ F.conj().T, np.diag(spec.b1.ravel()), atol=1e-10)
    b4 = -CFG.mu2 * G[: N * N]
    np.testing.assert_allclose(F @ b4 @ F.conj().T, np.diag(spec.b4.ravel()), atol=1e-10)
    # at DC the v blocks reduce to mu2
    assert spec.b2[0, 0] == pytest.approx(CFG.mu2) and spec.b3[0, 0] == pytest.approx(CFG.mu2)


@pytest.mark.parametrize("mus", [(1e-3, 1e-3, 1e-3, 1e-3), (6e2, 1e1, 2e1, 1e4), (1.0, 100.0, 0.01, 1.0)])
def test_per_frequency_matrices_hpd(mus):
    A = fourier_operator(make_radial_mask(16, 4))
    t = build_wavelet(16, 2, "db2")
    cfg = CFG.replace(mu1=mus[0], mu2=mus[1], mu3=mus[2], beta=mus[3])
    spec = assemble_spectra(cfg, t, A)
    for i in range(16):
        for j in range(16):
            m = spec.matrix_at(i, j)
            np.testing.assert_allclose(m, m.conj().T, atol=1e-12)
            assert np.linalg.eigvalsh(m).min() > 0


def test_penalties_must_be_positive(fourier_setup):
    A, t = fourier_setup
    with pytest.raises(ValueError):
        assemble_spectra(CFG.replace(mu2=0.0), t, A)


def test_diagonal_solver_matches_dense(fourier_setup, rng):
    A, t = fourier_setup
    st = random_state(A, t, rng)
    M, rhs = dense_system(A, t, st)
    x = np.linalg.solve(M, rhs)
    got = stacked(*solve_diagonal(assemble_spectra(CFG, t, A), build_rhs(st, CFG, t, A)))
    assert np.linalg.norm(M @ got - rhs) / np.linalg.norm(rhs) < 1e-10
    assert np.linalg.norm(got - x) / np.linalg.norm(x) < 1e-8


def test_cg_solver_agrees_with_direct(fourier_setup, rng):
    A, t = fourier_setup
    st = random_state(A, t, rng)
    spec = assemble_spectra(CFG, t, A)
    r = build_rhs(st, CFG, t, A)
    u, v = solve_triangular_cg(spec, r, A, cg_iters=500, cg_tol=1e-12)
    ud, vd = solve_diagonal(spec, r)
    scale = np.max(np.abs(ud))
    assert np.max(np.abs(u - ud)) < 1e-8 * scale and np.max(np.abs(v - vd)) < 1e-8 * scale


def test_identity_spectra_return_rhs(rng):
    n = 4
    one = np.ones((n, n))
    z = np.zeros((n, n), dtype=complex)
    spec = BlockSystemSpectra(n=n, beta=1.0, mu1=1.0, mu2=1.0, mu3=1.0, k1=one, b1=one + 0j,
                              b2=one, b3=one, b4=z, b5=z, b6=z)
    R = [rng.standard_normal((n, n)) for _ in range(3)]
    u, v = solve_diagonal(spec, RightHandSide(*R), real=True)
    np.testing.assert_allclose(u, R[0], atol=1e-12)
    np.testing.assert_allclose(v[0], R[1], atol=1e-12)
    np.testing.assert_allclose(v[1], R[2], atol=1e-12)


def test_cg_on_radon_matches_dense(radon_setup, rng):
    A, t = radon_setup
    st = random_state(A, t, rng)
    M, rhs = dense_system(A, t, st)
    spec = assemble_spectra(CFG, t, A)
    r = build_rhs(st, CFG, t, A)
    info = {}
    u, v = solve_triangular_cg(spec, r, A, cg_iters=500, cg_tol=1e-12, info=info)
    assert np.linalg.norm(M @ stacked(u, v) - rhs) / np.linalg.norm(rhs) < 1e-9
    assert block_residual(spec, A, r, u, v) < 1e-9
    assert info["iterations"] > 0


def test_cg_block_residual_shrinks(radon_setup, rng):
    A, t = radon_setup
    st = random_state(A, t, rng)
    spec = assemble_spectra(CFG, t, A)
    r = build_rhs(st, CFG, t, A)
    res = [block_residual(spec, A, r, *solve_triangular_cg(spec, r, A, cg_iters=k, cg_tol=0.0))
           for k in (2, 10, 40)]
    assert res[0] > res[1] > res[2]


def test_cg_zero_rhs_gives_zero(fourier_setup, rng):
    A, t = fourier_setup
    spec = assemble_spectra(CFG, t, A)
    z = np.zeros((N, N))
    u, v = solve_triangular_cg(spec, RightHandSide(z, z, z), A,
                               warm_start=(rng.standard_normal((N, N)), None))
    assert not u.any() and not v.any()


def test_warm_start_near_solution_helps(radon_setup, rng):
    A, t = radon_setup
    st = random_state(A, t, rng)
    spec = assemble_spectra(CFG, t, A)
    r = build_rhs(st, CFG, t, A)
    exact, _ = solve_triangular_cg(spec, r, A, cg_iters=500, cg_tol=1e-13)
    near = exact + 1e-4 * cnormal(rng, (N, N))
    cold = block_residual(spec, A, r, *solve_triangular_cg(spec, r, A, cg_iters=3, cg_tol=0))
    warm = block_residual(spec, A, r, *solve_triangular_cg(spec, r, A, warm_start=(near, None),
                                                           cg_iters=3, cg_tol=0))
    assert warm < cold


def test_cg_detects_indefinite_operator(fourier_setup, rng):
    A, t = fourier_setup

    class Broken:
        n, m = A.n, A.m

        def normal(self, u):
            return -50.0 * u

    spec = assemble_spectra(CFG, t, A)
    st = random_state(A, t, rng)
    with pytest.raises(FloatingPointError):
        solve_triangular_cg(spec, build_rhs(st, CFG, t, A), Broken(), cg_iters=10)


@pytest.mark.parametrize("reg", ["tv", "none"])
def test_modes_without_v(reg, rng):
    A = inpainting_operator(rng.random((N, N)) > 0.3)
    t = build_wavelet(N, 2, "haar")
    cfg = CFG.replace(regularizer=reg)
    spec = assemble_spectra(cfg, t, A)
    assert not spec.has_v and not spec.diagonal
    r = build_rhs(random_state(A, t, rng, cfg), cfg, t, A)
    assert r.R2 is None
    u, v = solve_triangular_cg(spec, r, A, cg_iters=300, cg_tol=1e-12)
    assert v is None
    assert block_residual(spec, A, r, u, v) < 1e-9
