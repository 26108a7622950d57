"""Split Bregman reconstruction with reweighted multilevel l1 and TGV, plus IHT.

The reconstruction solves::

    min_u  sum_j lam_j ||W_j Psi_j u||_1 + TGV(u)   s.t.  A u = y

with the splits ``w = Psi u``, ``d = grad u - v`` and ``t = E v``. The
weights ``lam_j`` and ``W_j`` are refreshed from the current iterate inside
every sweep, right before the ``w`` shrinkage.
"""

import csv
import dataclasses
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .grid import forward_gradient, sym_gradient, tensor_l1_norm, vec_l1_norm
from .linsolve import assemble_spectra, build_rhs, solve_diagonal, solve_triangular_cg
from .metrics import relative_error, ssim
from .reweighting import (
    STRATEGIES,
    iht_strategy_f1,
    iht_strategy_f2,
    oracle_weights,
    update_schedule,
)
from .shrinkage import hard_threshold, shrink2, shrinkF


class NumericalAbort(RuntimeError):
    """Raised when the iteration produces non-finite values."""


@dataclass
class SolverConfig:
    """Parameters of the split Bregman reconstruction.

    ``inner`` is the number of sweeps between Bregman updates, and each
    sweep runs ``gs_iters`` block Gauss-Seidel passes over ``(u, v)``, ``w``,
    ``d``, ``t``. ``regularizer`` is ``"tgv"``, ``"tv"`` or ``"none"``;
    ``use_transform=False`` drops the multilevel term. ``cg_iters=None``
    picks 0 (direct solve) for Fourier-diagonal operators and 75 otherwise.
    ``real=None`` detects real problems from the data.

    The penalties act on absolute intensities, so the solver works on
    ``data_scale * y`` and divides the result back. Scaling the data is the
    same as scaling every penalty (and ``eps``) together.
    """

    alpha0: float = 1.0
    alpha1: float = 2.0
    mu1: float = 6e2
    mu2: float = 1e1
    mu3: float = 2e1
    beta: float = 1e4
    eps: float = 1e-4
    inner: int = 4
    gs_iters: int = 2
    max_iter: int = 100
    reweight: str = "ml-max"
    quantile: float = 0.9
    const_lambda: float = 1.0
    regularizer: str = "tgv"
    use_transform: bool = True
    linear_solver: str = "auto"
    cg_iters: int = None
    cg_tol: float = 1e-8
    rhs_variant: str = "sum"
    real: bool = None
    data_scale: float = 60.0

    @classmethod
    def wavelet_defaults(cls, **kw):
        return cls(**kw)

    @classmethod
    def shearlet_defaults(cls, **kw):
        base = dict(mu1=5e3, mu2=1e1, mu3=2e1, alpha0=1.0, alpha1=1.0, beta=1e5, eps=1e-5)
        base.update(kw)
        return cls(**base)

    @classmethod
    def radon_defaults(cls, **kw):
        base = dict(mu1=1e3, mu2=1e2, mu3=2e3, alpha0=1e-3, alpha1=2e-3, beta=1e1, eps=1e-6)
        base.update(kw)
        return cls(**base)

    def replace(self, **kw):
        return dataclasses.replace(self, **kw)

    def validate(self):
        for name in ("mu1", "mu2", "mu3", "beta", "eps", "data_scale"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("alpha0", "alpha1", "const_lambda"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        for name in ("inner", "gs_iters", "max_iter"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.reweight not in STRATEGIES:
            raise ValueError(f"reweight must be one of {STRATEGIES}, got {self.reweight!r}")
        if not 0 < self.quantile <= 1:
            raise ValueError("quantile must be in (0, 1]")
        if self.regularizer not in ("tgv", "tv", "none"):
            raise ValueError(f"regularizer must be tgv, tv or none, got {self.regularizer!r}")
        if self.linear_solver not in ("auto", "direct", "cg"):
            raise ValueError(f"linear_solver must be auto, direct or cg")
        if self.rhs_variant not in ("sum", "accumulated"):
            raise ValueError(f"rhs_variant must be sum or accumulated")
        if self.cg_iters is not None and self.cg_iters < 0:
            raise ValueError("cg_iters must be >= 0")
        if not self.use_transform and self.regularizer == "none":
            raise ValueError("at least one regularizer must be active")
        return self


@dataclass
class SolverState:
    """All split and Bregman variables. ``w``, ``bw`` are ``(S, n, n)`` arrays."""

    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    d: np.ndarray
    t: np.ndarray
    bw: np.ndarray
    bd: np.ndarray
    bt: np.ndarray
    y: np.ndarray
    yk: np.ndarray
    real: bool = True
    iteration: int = 0
    schedule: object = None

    def check(self, n, n_subbands, m):
        shapes = {
            "u": (self.u, (n, n)),
            "v": (self.v, (2, n, n)),
            "d": (self.d, (2, n, n)),
            "bd": (self.bd, (2, n, n)),
            "t": (self.t, (3, n, n)),
            "bt": (self.bt, (3, n, n)),
            "w": (self.w, (n_subbands, n, n)),
            "bw": (self.bw, (n_subbands, n, n)),
            "yk": (self.yk, (m,)),
        }
        for name, (arr, shape) in shapes.items():
            if arr.shape != shape:
                raise ValueError(f"state.{name} has shape {arr.shape}, expected {shape}")

    def finite(self):
        return all(
            np.all(np.isfinite(a))
            for a in (self.u, self.v, self.w, self.d, self.t, self.bw, self.bd, self.bt)
        )


@dataclass
class ConvergenceLog:
    """One record per completed outer iteration."""

    iteration: list = field(default_factory=list)
    re: list = field(default_factory=list)
    ssim: list = field(default_factory=list)
    residual: list = field(default_factory=list)
    objective: list = field(default_factory=list)
    seconds: list = field(default_factory=list)

    HEADER = ("iter", "re", "ssim", "residual", "objective", "seconds")

    def append(self, it, re, ss, res, obj, sec):
        self.iteration.append(it)
        self.re.append(re)
        self.ssim.append(ss)
        self.residual.append(res)
        self.objective.append(obj)
        self.seconds.append(sec)

    def __len__(self):
        return len(self.iteration)

    def rows(self):
        return zip(self.iteration, self.re, self.ssim, self.residual, self.objective, self.seconds)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(self.HEADER)
            for it, re, ss, res, obj, sec in self.rows():
                wr.writerow([it, _fmt(re), _fmt(ss), _fmt(res), _fmt(obj), f"{sec:.6f}"])

    @classmethod
    def from_csv(cls, path):
        log = cls()
        with open(path, newline="") as fh:
            rd = csv.reader(fh)
            header = tuple(next(rd))
            if header != cls.HEADER:
                raise ValueError(f"{path}: unexpected header {header}")
            for row in rd:
                vals = [float(x) if x != "" else float("nan") for x in row[1:]]
                log.append(int(row[0]), *vals)
        return log


def _fmt(x):
    return "" if x is None or (isinstance(x, float) and np.isnan(x)) else repr(float(x))


def _is_real_problem(A, y, aty):
    if not A.real_preserving:
        return False
    scale = max(np.max(np.abs(aty)), 1e-300)
    return bool(np.max(np.abs(np.imag(aty))) <= 1e-10 * max(scale, 1.0))


def init_state(A, t, y, cfg, real=None):
    """Initial state: ``u = A^*y`` and every other variable zero."""
    y = np.asarray(y).reshape(-1)
    aty = A.adjoint(y)
    if real is None:
        real = _is_real_problem(A, y, aty)
    dtype = float if real else complex
    u0 = aty.real.copy() if real else np.asarray(aty, dtype=complex)
    n = A.n
    S = t.n_subbands if t is not None else 1
    z2 = np.zeros((2, n, n), dtype=dtype)
    z3 = np.zeros((3, n, n), dtype=dtype)
    zs = np.zeros((S, n, n), dtype=dtype)
    yk = y.copy() if cfg.rhs_variant == "accumulated" else np.zeros_like(y)
    return SolverState(
        u=u0, v=z2.copy(), w=zs.copy(), d=z2.copy(), t=z3.copy(), bw=zs.copy(),
        bd=z2.copy(), bt=z3.copy(), y=y, yk=yk, real=real,
    )


def objective_surrogate(state, cfg, t):
    """``sum_j lam_j ||W_j Psi_j u||_1 + alpha1 ||grad u - v||_1 + alpha0 ||E v||_1``.

    Uses the weights stored on the state (unit weights and ``const_lambda``
    on the detail bands if none were computed yet).
    """
    total = 0.0
    if cfg.use_transform and t is not None:
        c = t.analyze_array(state.u)
        sched = state.schedule
        if sched is None:
            lam = np.full(c.shape[0], cfg.const_lambda)
            lam[0] = 0.0
            wts = 1.0
        else:
            lam, wts = sched.lam, sched.w
        total += float(np.sum(lam[:, None, None] * wts * np.abs(c)))
    if cfg.regularizer in ("tv", "tgv"):
        g = forward_gradient(state.u)
        if cfg.regularizer == "tgv":
            g = g - state.v
        total += cfg.alpha1 * vec_l1_norm(g)
    if cfg.regularizer == "tgv":
        total += cfg.alpha0 * tensor_l1_norm(sym_gradient(state.v))
    return total


def split_bregman_reconstruct(A, t, y, cfg, reference=None, frozen=None, callback=None):
    """Reconstruct an image from measurements ``y = A u``.

    Parameters
    ----------
    A : SamplingOperator
    t : MultilevelTransform or None
        Sparsifying transform; ignored when ``cfg.use_transform`` is false.
    y : ndarray
        Measurement vector of length ``A.m``.
    cfg : SolverConfig
    reference : ndarray, optional
        Ground truth for the RE/SSIM columns of the log.
    frozen : WeightSchedule, optional
        Fixed weights for ``cfg.reweight == "oracle"``, in scaled units
        (see :func:`oracle_schedule`).
    callback : callable, optional
        Called as ``callback(k, state)`` after every outer iteration.

    Returns
    -------
    u : ndarray
    log : ConvergenceLog
        RE and SSIM are scale invariant; the objective is in scaled units.

    Raises
    ------
    NumericalAbort
        If any variable becomes non-finite.
    """
    cfg.validate()
    if cfg.use_transform and t is None:
        raise ValueError("a transform is required when use_transform is set")
    if cfg.reweight == "oracle" and frozen is None:
        raise ValueError("oracle reweighting needs frozen weights")
    y = np.asarray(y).reshape(-1)
    if y.size != A.m:
        raise ValueError(f"measurement length {y.size} does not match operator m={A.m}")
    if not np.all(np.isfinite(y)):
        raise ValueError("measurements contain non-finite values")
    if reference is not None and np.shape(reference) != (A.n, A.n):
        raise ValueError("reference shape does not match the operator")
    scale = float(cfg.data_scale)
    y = y * scale
    if cfg.use_transform and t.n != A.n:
        raise ValueError("transform and operator sizes differ")

    st = init_state(A, t, y, cfg, real=cfg.real)
    st.check(A.n, t.n_subbands if t is not None else 1, A.m)
    spectra = assemble_spectra(cfg, t if cfg.use_transform else None, A)
    if cfg.linear_solver == "direct" and not spectra.diagonal:
        raise ValueError("direct solve needs a Fourier-diagonal operator")
    use_cg = cfg.linear_solver == "cg" or not spectra.diagonal
    cg_iters = cfg.cg_iters if cfg.cg_iters is not None else (75 if use_cg else 0)
    use_tgv = cfg.regularizer == "tgv"
    use_grad = cfg.regularizer in ("tv", "tgv")
    inv_mu1 = 1.0 / cfg.mu1
    ynorm = float(np.linalg.norm(y))
    log = ConvergenceLog()
    t0 = time.perf_counter()
    c = None
    g = e = None

    for k in range(cfg.max_iter):
        for _ in range(cfg.inner):
            for _ in range(cfg.gs_iters):
                rhs = build_rhs(st, cfg, t, A)
                try:
                    if use_cg:
                        u, v = solve_triangular_cg(
                            spectra, rhs, A, warm_start=(st.u, st.v), cg_iters=cg_iters,
                            cg_tol=cfg.cg_tol, real=st.real,
                        )
                    else:
                        u, v = solve_diagonal(spectra, rhs, real=st.real)
                except FloatingPointError as exc:
                    raise NumericalAbort(f"linear solve failed in iteration {k + 1}: {exc}") from exc
                st.u = u
                if use_tgv:
                    st.v = v
                if cfg.use_transform:
                    c = t.analyze_array(st.u)
                    st.schedule = update_schedule(
                        cfg.reweight, c, cfg.eps, cfg.quantile, cfg.const_lambda, frozen
                    )
                    st.w = kernels.banded_soft_threshold(
                        c + st.bw, st.schedule.lam, st.schedule.w, inv_mu1
                    )
                if use_grad:
                    g = forward_gradient(st.u)
                    if use_tgv:
                        g = g - st.v
                    st.d = shrink2(g + st.bd, cfg.alpha1 / cfg.mu2)
                if use_tgv:
                    e = sym_gradient(st.v)
                    st.t = shrinkF(e + st.bt, cfg.alpha0 / cfg.mu3)
        if cfg.use_transform:
            st.bw = st.bw + c - st.w
        if use_grad:
            st.bd = st.bd + g - st.d
        if use_tgv:
            st.bt = st.bt + e - st.t
        au = A.forward(st.u)
        st.yk = st.yk + y - au
        st.iteration = k + 1
        if not st.finite():
            raise NumericalAbort(
                f"non-finite values after outer iteration {k + 1}; "
                "try smaller penalties or check the operator adjoint"
            )
        res = float(np.linalg.norm(au - y) / ynorm) if ynorm > 0 else 0.0
        re = ss = None
        if reference is not None:
            re = relative_error(reference, st.u / scale)
            ss = ssim(reference, st.u / scale)
        obj = objective_surrogate(st, cfg, t)
        log.append(k + 1, re, ss, res, obj, time.perf_counter() - t0)
        if callback is not None:
            callback(k, st)
    return st.u / scale, log


def oracle_schedule(t, reference, cfg):
    """Weights frozen from the true coefficients, in the solver's scaled units."""
    return oracle_weights(t.analyze(np.asarray(reference) * cfg.data_scale), cfg.eps)


def iht_inpaint(A, t, y, strategy, param, eps, sigma, iters, reference=None,
                threshold_lowpass=False, callback=None):
    """Iterative hard thresholding with reweighted thresholds.

    Each step forms ``z = A^*(y - A u) + u`` and keeps the coefficients of
    ``Psi z`` above ``delta``. The thresholds are recomputed from the new
    ``z`` with strategy ``f1`` (``param`` is lambda) or ``f2`` (``param``
    is mu) and scaled by ``sigma**i``, so they decay over the run. The
    lowpass band is never thresholded unless ``threshold_lowpass``.

    Returns ``(u, re_history)``; the history is empty without a reference.
    ``callback(i, u)`` is called after every step.
    """
    if not 0 < sigma < 1:
        raise ValueError("sigma must be in (0, 1)")
    if iters < 1:
        raise ValueError("iters must be >= 1")
    if strategy == "f1":
        rule = iht_strategy_f1
    elif strategy == "f2":
        rule = iht_strategy_f2
    else:
        raise ValueError(f"strategy must be f1 or f2, got {strategy!r}")
    y = np.asarray(y).reshape(-1)

    def thresholds(z, scale):
        c = t.analyze(z)
        delta = rule(c, param, eps).coeffs * scale
        if not threshold_lowpass:
            delta[0] = 0.0
        return delta

    u_rec = np.zeros((A.n, A.n))
    delta = thresholds(A.adjoint(y).real, 1.0)
    history = []
    for i in range(iters):
        u_res = A.adjoint(y - A.forward(u_rec)).real
        z = u_res + u_rec
        c = t.analyze(z)
        u_rec = t.synthesize(hard_threshold(c, delta)).real
        delta = thresholds(u_res + u_rec, sigma ** (i + 1))
        if reference is not None:
            history.append(relative_error(reference, u_rec))
        if callback is not None:
            callback(i, u_rec)
    return u_rec, history
