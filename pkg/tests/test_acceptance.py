"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line (printed in the terminal summary and to
stdout) and then asserts, so a failing criterion fails the suite. The long
reconstructions are shared through session fixtures.
"""

import os
import subprocess
import sys
import time

import numpy as np
import pytest

from _oracles import grid_prox_minimum, prox_objective
from sbrecon.cli import read_summary
from sbrecon.config import load_config
from sbrecon.experiment import build_problem, run
from sbrecon.grid import (
    forward_gradient,
    forward_gradient_adjoint,
    sym_gradient,
    sym_gradient_adjoint,
    tensor_inner,
)
from sbrecon.linsolve import assemble_spectra, build_rhs, solve_diagonal, solve_triangular_cg
from sbrecon.metrics import relative_error, ssim
from sbrecon.phantoms import make_phantom
from sbrecon.sampling import (
    fourier_operator,
    inpainting_operator,
    make_radial_mask,
    radon_operator,
    random_pixel_mask,
)
from sbrecon.shrinkage import shrink, shrink2, shrinkF
from sbrecon.solver import SolverConfig, iht_inpaint, init_state
from sbrecon.transforms import build_shearlet, build_wavelet

ROOT = os.path.join(os.path.dirname(__file__), "..")
CONFIGS = os.path.join(ROOT, "configs")


def record(report, number, ok, detail):
    report.append((number, bool(ok), detail))
    print(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
    return ok


def timed_run(path, **overrides):
    cfg = load_config(os.path.join(CONFIGS, path))
    for k, v in overrides.items():
        setattr(cfg, k, v)
    t0 = time.perf_counter()
    res = run(cfg)
    return cfg, res, time.perf_counter() - t0


@pytest.fixture(scope="session")
def fourier_runs():
    return {
        "wirl1": timed_run("fourier_wirl1_tgv.ini"),
        "wl1": timed_run("fourier_wl1_tgv.ini"),
    }


@pytest.fixture(scope="session")
def shepp_run():
    return timed_run("shepp_haar.ini")


@pytest.fixture(scope="session")
def radon_run():
    return timed_run("radon_wirl1_tgv.ini")


# 1


def _inner(a, b):
    return np.vdot(b.ravel(), a.ravel())


def _gap(lhs, rhs):
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)


def test_criterion_1_operators(acceptance_report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    n = 64

    def cimg(shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    wavelets = [build_wavelet(n, 3, f) for f in ("haar", "db2", "db4")]
    shear = build_shearlet(n, 3, [0, 1, 1])
    samplers = {
        "fourier": fourier_operator(make_radial_mask(n, 17)),
        "radon": radon_operator(n, 23),
        "inpaint": inpainting_operator(random_pixel_mask(n, 0.4, seed=3)),
    }
    worst = {}

    def note(name, value):
        worst[name] = max(worst.get(name, 0.0), value)

    for _ in range(100):
        u = cimg((n, n))
        for name, A in samplers.items():
            yv = cimg((A.m,))
            note(name, _gap(_inner(A.forward(u), yv), _inner(u, A.adjoint(yv))))
        p = cimg((2, n, n))
        note("gradient", _gap(_inner(forward_gradient(u), p), _inner(u, forward_gradient_adjoint(p))))
        v = rng.standard_normal((2, n, n))
        tt = rng.standard_normal((3, n, n))
        note("sym-gradient", _gap(tensor_inner(sym_gradient(v), tt),
                                  float(np.vdot(v, sym_gradient_adjoint(tt)).real)))
        for t in wavelets + [shear]:
            c = cimg((t.n_subbands, n, n))
            note(t.name, _gap(_inner(t.analyze_array(u), c), _inner(u, t.adjoint_analyze(c))))
    pr = tight = 0.0
    for t in wavelets + [shear]:
        u = rng.standard_normal((n, n))
        c = t.analyze_array(u)
        pr = max(pr, np.linalg.norm(t.synthesize(c) - u) / np.linalg.norm(u))
        tight = max(tight, abs(np.linalg.norm(c) ** 2 / np.linalg.norm(u) ** 2 - 1.0),
                    np.linalg.norm(t.adjoint_analyze(c) - u) / np.linalg.norm(u))
        assert t.is_tight and abs(t.frame_bound - 1.0) < 1e-10
    elapsed = time.perf_counter() - t0
    adj = max(worst.values())
    ok = adj < 1e-10 and pr < 1e-10 and tight < 1e-10 and elapsed < 30
    record(acceptance_report, 1, ok,
           f"worst adjoint gap {adj:.1e} over 100 draws x {len(worst)} operators, "
           f"reconstruction {pr:.1e}, tightness (a=1) {tight:.1e}, {elapsed:.1f}s")
    assert ok, worst


# 2


def test_criterion_2_linear_solvers(acceptance_report):
    from test_linsolve import CFG, dense_system, random_state

    t0 = time.perf_counter()
    rng = np.random.default_rng(202)
    N = 8
    A = fourier_operator(make_radial_mask(N, 3))
    t = build_wavelet(N, 2, "haar")
    worst_d = worst_cg = worst_pair = 0.0
    for _ in range(5):
        st = random_state(A, t, rng)
        M, rhs = dense_system(A, t, st)
        spec = assemble_spectra(CFG, t, A)
        r = build_rhs(st, CFG, t, A)
        ud, vd = solve_diagonal(spec, r)
        uc, vc = solve_triangular_cg(spec, r, A, cg_iters=1000, cg_tol=1e-10)
        xd = np.concatenate([ud.ravel(), vd.ravel()])
        xc = np.concatenate([uc.ravel(), vc.ravel()])
        bn = np.linalg.norm(rhs)
        worst_d = max(worst_d, np.linalg.norm(M @ xd - rhs) / bn)
        worst_cg = max(worst_cg, np.linalg.norm(M @ xc - rhs) / bn)
        worst_pair = max(worst_pair, np.linalg.norm(xd - xc) / np.linalg.norm(xd))
    elapsed = time.perf_counter() - t0
    ok = worst_d < 1e-8 and worst_cg < 1e-8 and worst_pair < 1e-6 and elapsed < 10
    record(acceptance_report, 2, ok,
           f"dense residual direct {worst_d:.1e}, CG {worst_cg:.1e}; paths differ by "
           f"{worst_pair:.1e}; {elapsed:.1f}s")
    assert ok


# 3


def test_criterion_3_prox(acceptance_report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(303)
    gaps = {}
    cases = {
        "shrink": ((1.0,), lambda z, lam: np.atleast_1d(shrink(z[0], lam))),
        "shrink2": ((1.0, 1.0), lambda z, lam: shrink2(z[:, None], lam)[:, 0]),
        "shrinkF": ((1.0, 2.0, 1.0), lambda z, lam: shrinkF(z[:, None], lam)[:, 0]),
    }
    for name, (mult, prox) in cases.items():
        worst = -np.inf
        for _ in range(1000):
            z = rng.uniform(-2, 2, len(mult))
            lam = rng.uniform(0, 2)
            x = prox(z, lam)
            worst = max(worst, prox_objective(x, z, lam, mult) - grid_prox_minimum(z, lam, mult))
        gaps[name] = worst
    elapsed = time.perf_counter() - t0
    ok = max(gaps.values()) < 1e-6 and elapsed < 10
    record(acceptance_report, 3, ok,
           "largest objective gap vs grid search "
           + ", ".join(f"{k} {v:.1e}" for k, v in gaps.items()) + f"; {elapsed:.1f}s")
    assert ok


# 4


def test_criterion_4_fourier(fourier_runs, acceptance_report):
    cfg, ml, secs_ml = fourier_runs["wirl1"]
    _, flat, secs_flat = fourier_runs["wl1"]
    rate = make_radial_mask(cfg.n, cfg.lines).sampling_rate
    gain = 1.0 - ml.re / flat.re
    ok = (ml.re <= 0.05 and gain >= 0.2 and ml.ssim > flat.ssim
          and secs_ml + secs_flat < 300 and len(ml.log) == 100)
    record(acceptance_report, 4, ok,
           f"WIRL1+TGV RE {ml.re:.4f} SSIM {ml.ssim:.4f}; WL1+TGV RE {flat.re:.4f} "
           f"SSIM {flat.ssim:.4f}; improvement {100 * gain:.0f}%; {cfg.lines} lines = "
           f"{100 * rate:.1f}% of k-space; {secs_ml + secs_flat:.0f}s")
    assert ok


# 5


def test_criterion_5_piecewise_constant(shepp_run, acceptance_report):
    cfg, res, secs = shepp_run
    rate = make_radial_mask(cfg.n, cfg.lines).sampling_rate
    ok = res.re <= 0.01 and secs < 480 and len(res.log) == 150 and 0.08 <= rate <= 0.12
    record(acceptance_report, 5, ok,
           f"shepp-logan, Haar, {cfg.lines} lines = {100 * rate:.1f}%: RE {res.re:.4f} "
           f"SSIM {res.ssim:.4f}; {secs:.0f}s")
    assert ok


# 6


def test_criterion_6_radon(radon_run, acceptance_report):
    cfg, res, secs = radon_run
    p = build_problem(cfg)
    back = p.A.adjoint(p.y)
    # the most favourable scaling of the plain backprojection
    scale = float(np.vdot(back, p.image) / np.vdot(back, back))
    re_adj = relative_error(p.image, scale * back)
    ok = res.re <= 0.05 and re_adj >= 3 * res.re and secs < 900 and len(res.log) == 150
    record(acceptance_report, 6, ok,
           f"{cfg.angles} angles: WIRL1+TGV RE {res.re:.4f} SSIM {res.ssim:.4f}; "
           f"scaled backprojection RE {re_adj:.4f}; {secs:.0f}s with cg_iters="
           f"{cfg.solver.cg_iters}")
    assert ok


# 7


def test_criterion_7_constraint(fourier_runs, shepp_run, radon_run, acceptance_report):
    runs = {
        "fourier WIRL1": fourier_runs["wirl1"][1],
        "fourier WL1": fourier_runs["wl1"][1],
        "shepp-logan": shepp_run[1],
        "radon": radon_run[1],
    }
    parts, ok = [], True
    for name, res in runs.items():
        r10, rend = res.log.residual[9], res.log.residual[-1]
        good = rend < 0.1 * r10
        ok &= good
        parts.append(f"{name} {r10:.1e}->{rend:.1e} ({rend / r10:.2f}{'' if good else ' !'})")
    record(acceptance_report, 7, ok, "residual at iteration 10 -> final: " + "; ".join(parts))
    assert ok


# 8


def test_criterion_8_iht(acceptance_report):
    cfg = load_config(os.path.join(CONFIGS, "inpaint_f2.ini"))
    p = build_problem(cfg)
    t0 = time.perf_counter()
    common = dict(eps=cfg.iht_eps, sigma=cfg.iht_sigma, iters=cfg.iht_iters, reference=p.image)
    _, h2 = iht_inpaint(p.A, p.transform, p.y, "f2", cfg.iht_param, **common)
    # f1 gets the same budget and its best lambda from a sweep, in units of
    # the largest highpass coefficient of the zero-filled image
    c = p.transform.analyze_array(p.A.adjoint(p.y).real)
    hp = float(np.abs(c[1:]).max())
    f1 = {}
    for factor in (0.01, 0.03, 0.1, 0.3):
        _, h1 = iht_inpaint(p.A, p.transform, p.y, "f1", factor * hp, **common)
        f1[factor] = h1[-1]
    best = min(f1.values())
    ok = h2[-1] <= best
    record(acceptance_report, 8, ok,
           f"{cfg.iht_iters} steps each: f2 RE {h2[-1]:.4f}, best f1 RE {best:.4f} "
           f"(lambda sweep {', '.join(f'{v:.4f}' for v in f1.values())}); "
           f"{time.perf_counter() - t0:.0f}s")
    assert ok


# 9


def test_criterion_9_determinism(fourier_runs, tmp_path, acceptance_report):
    cfg_path = os.path.join(CONFIGS, "fourier_wirl1_tgv.ini")
    out = tmp_path / "rerun"
    cmd = [sys.executable, "-m", "sbrecon.cli", "reconstruct", "--config", cfg_path,
           "--out", str(out), "--test-mode"]
    subprocess.run(cmd, check=True, capture_output=True)
    s = read_summary(out / "summary.txt")
    _, first, _ = fourier_runs["wirl1"]
    re_ok = round(float(s["re"]), 6) == round(first.re, 6)
    ss_ok = round(float(s["ssim"]), 6) == round(first.ssim, 6)
    ok = re_ok and ss_ok
    record(acceptance_report, 9, ok,
           f"--test-mode rerun RE {float(s['re']):.6f} vs {first.re:.6f}, "
           f"SSIM {float(s['ssim']):.6f} vs {first.ssim:.6f}")
    assert ok
