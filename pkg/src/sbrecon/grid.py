"""Periodic finite differences on square grids.

Images are ``(n, n)`` arrays (real or complex). Axis 1 is ``x`` (columns),
axis 0 is ``y`` (rows). A vector field is stacked as ``(2, n, n)`` with
components ``(x, y)``; a symmetric tensor field as ``(3, n, n)`` with
components ``(xx, xy, yy)``. The tensor inner product counts ``xy`` twice.
"""

import numpy as np

TENSOR_MULTIPLICITY = (1.0, 2.0, 1.0)


def check_image(u, name="u"):
    """Validate an image and return it as an array."""
    u = np.asarray(u)
    if u.ndim != 2:
        raise ValueError(f"{name} must be a 2-D image, got shape {u.shape}")
    if u.shape[0] != u.shape[1]:
        raise ValueError(f"{name} must be square, got shape {u.shape}")
    if u.shape[0] < 2:
        raise ValueError(f"{name} needs side length >= 2")
    return u


def _check_stack(p, k, name):
    p = np.asarray(p)
    if p.ndim != 3 or p.shape[0] != k or p.shape[1] != p.shape[2]:
        raise ValueError(f"{name} must have shape ({k}, n, n), got {p.shape}")
    return p


def dx_forward(u):
    return np.roll(u, -1, axis=-1) - u


def dy_forward(u):
    return np.roll(u, -1, axis=-2) - u


def dx_backward(u):
    return u - np.roll(u, 1, axis=-1)


def dy_backward(u):
    return u - np.roll(u, 1, axis=-2)


def dx_forward_adjoint(p):
    # adjoint of a forward difference is the negated backward difference
    return -dx_backward(p)


def dy_forward_adjoint(p):
    return -dy_backward(p)


def dx_backward_adjoint(p):
    return -dx_forward(p)


def dy_backward_adjoint(p):
    return -dy_forward(p)


def forward_gradient(u):
    """Forward-difference gradient with periodic wrap, shape ``(2, n, n)``."""
    u = check_image(u)
    return np.stack([dx_forward(u), dy_forward(u)])


def forward_gradient_adjoint(p):
    """Exact adjoint of :func:`forward_gradient` (minus the backward divergence)."""
    p = _check_stack(p, 2, "p")
    return dx_forward_adjoint(p[0]) + dy_forward_adjoint(p[1])


def sym_gradient(v):
    """Symmetrized backward-difference derivative of a vector field.

    Returns ``(xx, xy, yy) = (Dx v_x, (Dy v_x + Dx v_y) / 2, Dy v_y)``.
    """
    v = _check_stack(v, 2, "v")
    vx, vy = v
    return np.stack(
        [dx_backward(vx), 0.5 * (dy_backward(vx) + dx_backward(vy)), dy_backward(vy)]
    )


def sym_gradient_adjoint(t):
    """Adjoint of :func:`sym_gradient` under the doubled-``xy`` inner product."""
    t = _check_stack(t, 3, "t")
    txx, txy, tyy = t
    return np.stack(
        [
            dx_backward_adjoint(txx) + dy_backward_adjoint(txy),
            dx_backward_adjoint(txy) + dy_backward_adjoint(tyy),
        ]
    )


def tensor_inner(s, t):
    """Real inner product of two tensor fields, ``xy`` counted twice."""
    s = _check_stack(s, 3, "s")
    t = _check_stack(t, 3, "t")
    return float(
        np.real(np.vdot(s[0], t[0]) + 2.0 * np.vdot(s[1], t[1]) + np.vdot(s[2], t[2]))
    )


def vec_l1_norm(v):
    """Sum over pixels of the Euclidean norm of the 2-vector ``v(l)``."""
    v = _check_stack(v, 2, "v")
    return float(np.sum(np.sqrt(np.abs(v[0]) ** 2 + np.abs(v[1]) ** 2)))


def tensor_l1_norm(t):
    """Sum over pixels of the Frobenius norm of the symmetric 2x2 tensor."""
    t = _check_stack(t, 3, "t")
    return float(
        np.sum(np.sqrt(np.abs(t[0]) ** 2 + 2.0 * np.abs(t[1]) ** 2 + np.abs(t[2]) ** 2))
    )


_SYMBOLS = {
    # multiplier of fft2(op u) relative to fft2(u) for the unshifted DFT
    "dx_forward": (1, +1),
    "dy_forward": (0, +1),
    "dx_backward": (1, -1),
    "dy_backward": (0, -1),
}


def fourier_symbol(op, n):
    """Diagonal of ``F op F^*`` on the unshifted ``(n, n)`` frequency grid.

    ``op`` is one of ``"dx_forward"``, ``"dy_forward"``, ``"dx_backward"``,
    ``"dy_backward"``. The forward x-difference has symbol
    ``exp(2 pi i k / n) - 1`` at column frequency ``k``.
    """
    try:
        axis, sign = _SYMBOLS[op]
    except KeyError:
        raise ValueError(f"unknown difference operator {op!r}") from None
    k = np.arange(n)
    e = np.exp(2j * np.pi * k / n)
    one_d = e - 1.0 if sign > 0 else 1.0 - np.conj(e)
    if axis == 1:
        return np.broadcast_to(one_d[None, :], (n, n)).copy()
    return np.broadcast_to(one_d[:, None], (n, n)).copy()
