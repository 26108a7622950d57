"""The joint ``(u, v)`` subproblem of the split scheme.

Setting the gradient of the quadratic ``(u, v)`` energy to zero gives the
block system::

    [ b1   b4^*  b5^* ] [u  ]   [R1]
    [ b4   b2    b6^* ] [v_x] = [R2]
    [ b5   b6    b3   ] [v_y]   [R3]

with ``b1 = beta A^*A + mu1 Psi^*Psi + mu2 grad^* grad``, ``b4 = -mu2 Dx``,
``b5 = -mu2 Dy`` (forward differences) and ``b2, b3, b6`` built from the
backward differences of the symmetrized derivative. Everything except
``A^*A`` is a Fourier multiplier. When ``A^*A`` is one too the system
decouples into ``n**2`` Hermitian 3x3 systems solved by Cramer's rule;
otherwise ``v`` is eliminated per frequency and the remaining system in ``u``
is solved by conjugate gradients.
"""

from dataclasses import dataclass

import numpy as np

from . import fft, kernels
from .grid import (
    forward_gradient_adjoint,
    fourier_symbol,
    sym_gradient_adjoint,
)


@dataclass
class BlockSystemSpectra:
    """Per-frequency multipliers of the block system.

    ``k1`` is the Fourier-diagonal part of ``b1`` (everything but
    ``beta A^*A``); ``b1`` itself is set only when the operator has a
    Fourier diagonal. ``b2`` .. ``b6`` are ``None`` when there is no ``v``.
    """

    n: int
    beta: float
    mu1: float
    mu2: float
    mu3: float
    k1: np.ndarray
    b1: np.ndarray = None
    b2: np.ndarray = None
    b3: np.ndarray = None
    b4: np.ndarray = None
    b5: np.ndarray = None
    b6: np.ndarray = None
    gram: np.ndarray = None
    op_diag: np.ndarray = None

    @property
    def has_v(self):
        return self.b2 is not None

    @property
    def diagonal(self):
        return self.b1 is not None

    def matrix_at(self, i, j):
        """The 3x3 Hermitian matrix at frequency ``(i, j)`` (needs ``b1``)."""
        if not self.diagonal or not self.has_v:
            raise ValueError("full 3x3 blocks need b1 and the v blocks")
        b1, b2, b3 = self.b1[i, j], self.b2[i, j], self.b3[i, j]
        b4, b5, b6 = self.b4[i, j], self.b5[i, j], self.b6[i, j]
        return np.array(
            [
                [b1, np.conj(b4), np.conj(b5)],
                [b4, b2, np.conj(b6)],
                [b5, b6, b3],
            ]
        )


@dataclass
class RightHandSide:
    R1: np.ndarray
    R2: np.ndarray = None
    R3: np.ndarray = None


def effective_penalties(cfg):
    """``(mu1, mu2, mu3, has_v)`` after switching off inactive branches."""
    mu1 = cfg.mu1 if cfg.use_transform else 0.0
    mu2 = cfg.mu2 if cfg.regularizer in ("tgv", "tv") else 0.0
    mu3 = cfg.mu3 if cfg.regularizer == "tgv" else 0.0
    return mu1, mu2, mu3, cfg.regularizer == "tgv"


def assemble_spectra(cfg, t, A):
    """Fourier multipliers of the block system for config ``cfg``.

    ``t`` is the sparsifying transform (may be ``None`` when the transform
    branch is off) and ``A`` the sampling operator.
    """
    for name in ("beta", "mu1", "mu2", "mu3"):
        if not getattr(cfg, name) > 0:
            raise ValueError(f"penalty {name} must be positive")
    n = A.n
    mu1, mu2, mu3, has_v = effective_penalties(cfg)
    dxf = fourier_symbol("dx_forward", n)
    dyf = fourier_symbol("dy_forward", n)
    gram = t.gram_fourier_diagonal() if (t is not None and mu1 > 0) else np.zeros((n, n))
    k1 = mu1 * gram + mu2 * (np.abs(dxf) ** 2 + np.abs(dyf) ** 2)
    op_diag = A.fourier_diagonal
    spec = BlockSystemSpectra(
        n=n, beta=cfg.beta, mu1=mu1, mu2=mu2, mu3=mu3, k1=k1, gram=gram, op_diag=op_diag
    )
    if op_diag is not None:
        spec.b1 = (cfg.beta * op_diag + k1).astype(complex)
    if has_v:
        bx = fourier_symbol("dx_backward", n)
        by = fourier_symbol("dy_backward", n)
        ax, ay = np.abs(bx) ** 2, np.abs(by) ** 2
        spec.b2 = mu3 * (ax + 0.5 * ay) + mu2
        spec.b3 = mu3 * (ay + 0.5 * ax) + mu2
        spec.b4 = -mu2 * dxf
        spec.b5 = -mu2 * dyf
        spec.b6 = 0.5 * mu3 * np.conj(bx) * by
    return spec


def data_term(state, cfg):
    """The data vector entering ``R1``, per ``cfg.rhs_variant``.

    ``sum`` uses ``y + y_k`` with ``y_0 = 0``; ``accumulated`` uses
    ``y_k`` alone with ``y_0 = y``. Both produce the same iterates.
    """
    if cfg.rhs_variant == "sum":
        return state.y + state.yk
    if cfg.rhs_variant == "accumulated":
        return state.yk
    raise ValueError(f"unknown rhs_variant {cfg.rhs_variant!r}")


def build_rhs(state, cfg, t, A):
    """Right-hand side ``(R1, R2, R3)`` of the block system from the state."""
    mu1, mu2, mu3, has_v = effective_penalties(cfg)
    R1 = cfg.beta * A.adjoint(data_term(state, cfg))
    if state.real:
        R1 = R1.real
    if mu1 > 0:
        R1 = R1 + mu1 * t.adjoint_analyze(state.w - state.bw)
    if mu2 > 0:
        R1 = R1 + mu2 * forward_gradient_adjoint(state.d - state.bd)
    if not has_v:
        return RightHandSide(R1)
    tt = sym_gradient_adjoint(state.t - state.bt)
    R2 = mu2 * (state.bd[0] - state.d[0]) + mu3 * tt[0]
    R3 = mu2 * (state.bd[1] - state.d[1]) + mu3 * tt[1]
    return RightHandSide(R1, R2, R3)


def _finish(x, real):
    out = fft.ifft2(x)
    return out.real if real else out


def _solve_3x3_fallback(spec, r1, r2, r3, bad):
    idx = np.nonzero(bad)
    out = np.zeros((3, len(idx[0])), dtype=complex)
    for k, (i, j) in enumerate(zip(*idx)):
        out[:, k] = np.linalg.solve(spec.matrix_at(i, j), [r1[i, j], r2[i, j], r3[i, j]])
    return idx, out


def solve_diagonal(spectra, rhs, real=False):
    """Direct per-frequency solve; needs a Fourier-diagonal operator.

    Returns ``(u, v)``; ``v`` is ``None`` without the TGV branch.
    """
    if not spectra.diagonal:
        raise ValueError("solve_diagonal needs b1, i.e. a Fourier-diagonal operator")
    r1 = fft.fft2(rhs.R1)
    if not spectra.has_v:
        return _finish(r1 / spectra.b1, real), None
    r2 = fft.fft2(rhs.R2)
    r3 = fft.fft2(rhs.R3)
    x1, x2, x3, det = kernels.cramer3(
        spectra.b1, spectra.b2, spectra.b3, spectra.b4, spectra.b5, spectra.b6, r1, r2, r3
    )
    bad = np.abs(det) < 1e-300
    if bad.any():
        idx, sol = _solve_3x3_fallback(spectra, r1, r2, r3, bad)
        x1[idx], x2[idx], x3[idx] = sol
    if not np.all(np.isfinite(x1)):
        raise FloatingPointError("singular per-frequency system")
    v = np.stack([_finish(x2, real), _finish(x3, real)])
    return _finish(x1, real), v


def _schur_parts(spectra):
    """Reduced multiplier ``k1 - c^H D^{-1} c`` and the 2x2 inverse pieces."""
    if not spectra.has_v:
        return spectra.k1, None
    b2, b3, b4, b5, b6 = spectra.b2, spectra.b3, spectra.b4, spectra.b5, spectra.b6
    det2 = b2 * b3 - np.abs(b6) ** 2
    quad = b3 * np.abs(b4) ** 2 + b2 * np.abs(b5) ** 2 - 2.0 * np.real(np.conj(b4 * b6) * b5)
    return spectra.k1 - quad / det2, det2


def _apply_dinv(spectra, det2, r2, r3):
    b2, b3, b6 = spectra.b2, spectra.b3, spectra.b6
    return (b3 * r2 - np.conj(b6) * r3) / det2, (b2 * r3 - b6 * r2) / det2


def solve_triangular_cg(spectra, rhs, A, warm_start=None, cg_iters=75, cg_tol=1e-8,
                        real=False, info=None):
    """Eliminate ``v`` per frequency and solve for ``u`` by warm-started CG.

    The reduced operator ``beta A^*A + F^* s F`` is Hermitian positive
    definite, ``s`` being the Schur complement of the ``v`` blocks. ``v`` is
    recovered by back substitution. Pass a dict as ``info`` to receive the
    iteration count and the relative residual history.
    """
    n = spectra.n
    s, det2 = _schur_parts(spectra)
    r1 = fft.fft2(rhs.R1)
    if spectra.has_v:
        r2 = fft.fft2(rhs.R2)
        r3 = fft.fft2(rhs.R3)
        z2, z3 = _apply_dinv(spectra, det2, r2, r3)
        r1 = r1 - (np.conj(spectra.b4) * z2 + np.conj(spectra.b5) * z3)
    b = _finish(r1, real)

    def op(x):
        out = spectra.beta * A.normal(x) + fft.ifft2(s * fft.fft2(x))
        return out.real if real else out

    dtype = float if real else complex
    if warm_start is None or warm_start[0] is None:
        x = np.zeros((n, n), dtype=dtype)
    else:
        x = np.array(warm_start[0], dtype=dtype)
        if real:
            x = x.real
    x = _cg(op, b, x, cg_iters, cg_tol, info)
    if not spectra.has_v:
        return x, None
    xh = fft.fft2(x)
    vx, vy = _apply_dinv(spectra, det2, r2 - spectra.b4 * xh, r3 - spectra.b5 * xh)
    return x, np.stack([_finish(vx, real), _finish(vy, real)])


def _cg(op, b, x, iters, tol, info):
    bnorm = np.linalg.norm(b)
    history = []
    if bnorm == 0:
        # the unique solution of a nonsingular system with zero rhs
        x = np.zeros_like(x)
        if info is not None:
            info.update(iterations=0, residuals=[0.0])
        return x
    r = b - op(x)
    p = r.copy()
    rr = np.real(np.vdot(r, r))
    history.append(np.sqrt(rr) / bnorm)
    k = 0
    while k < iters and history[-1] > tol:
        ap = op(p)
        pap = np.real(np.vdot(p, ap))
        if pap <= 0:
            raise FloatingPointError(
                "CG breakdown: operator is not positive definite (adjoint mismatch?)"
            )
        alpha = rr / pap
        x = x + alpha * p
        r = r - alpha * ap
        rr_new = np.real(np.vdot(r, r))
        p = r + (rr_new / rr) * p
        rr = rr_new
        k += 1
        history.append(np.sqrt(rr) / bnorm)
    if info is not None:
        info.update(iterations=k, residuals=history)
    return x


def apply_block_system(spectra, A, u, v):
    """Apply the full block operator to ``(u, v)``; returns ``(row1, row2, row3)``."""
    uh = fft.fft2(u)
    row1 = spectra.beta * A.normal(u) + fft.ifft2(spectra.k1 * uh)
    if not spectra.has_v:
        return row1, None, None
    vx, vy = fft.fft2(v[0]), fft.fft2(v[1])
    row1 = row1 + fft.ifft2(np.conj(spectra.b4) * vx + np.conj(spectra.b5) * vy)
    row2 = fft.ifft2(spectra.b4 * uh + spectra.b2 * vx + np.conj(spectra.b6) * vy)
    row3 = fft.ifft2(spectra.b5 * uh + spectra.b6 * vx + spectra.b3 * vy)
    return row1, row2, row3


def block_residual(spectra, A, rhs, u, v):
    """Relative residual ``||M x - R|| / ||R||`` of the full block system."""
    rows = apply_block_system(spectra, A, u, v)
    parts = [(rows[0], rhs.R1)]
    if spectra.has_v:
        parts += [(rows[1], rhs.R2), (rows[2], rhs.R3)]
    num = np.sqrt(sum(np.linalg.norm(a - b) ** 2 for a, b in parts))
    den = np.sqrt(sum(np.linalg.norm(b) ** 2 for _, b in parts))
    return num / den if den > 0 else num
