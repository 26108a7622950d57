"""Pure numpy implementations of the hot kernels.

These are the reference versions. The compiled module ``_kernels`` exposes the
same functions with the same signatures and is preferred when it imports.
"""

import numpy as np

BACKEND = "python"


def soft_threshold(z, thr):
    """Elementwise soft-thresholding of a real or complex array.

    ``thr`` is a scalar or an array broadcastable against ``z``.
    """
    z = np.asarray(z)
    mag = np.abs(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.maximum(mag - thr, 0.0) / mag
    scale[mag == 0] = 0.0
    return z * scale


def banded_soft_threshold(z, lam, w, inv_mu):
    """Soft-threshold a subband stack with thresholds ``lam[s] * w[s, ...] * inv_mu``.

    ``z`` and ``w`` have shape ``(S, ...)``; ``lam`` has shape ``(S,)``.
    """
    lam = np.asarray(lam, dtype=float)
    thr = (lam * inv_mu).reshape((-1,) + (1,) * (z.ndim - 1)) * w
    return soft_threshold(z, thr)


def group_soft_threshold(x, thr, multiplicity):
    """Shrink the vector ``x[:, p]`` at every position ``p`` by its weighted norm.

    The norm is ``sqrt(sum_c multiplicity[c] * |x[c]|**2)``; ``multiplicity`` is
    ``(1, 1)`` for vector fields and ``(1, 2, 1)`` for symmetric tensors.
    """
    x = np.asarray(x)
    m = np.asarray(multiplicity, dtype=float).reshape((-1,) + (1,) * (x.ndim - 1))
    norm = np.sqrt(np.sum(m * (x.real**2 + x.imag**2), axis=0))
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.maximum(norm - thr, 0.0) / norm
    scale[norm == 0] = 0.0
    return x * scale


def cramer3(b1, b2, b3, b4, b5, b6, r1, r2, r3):
    """Solve the per-frequency Hermitian systems

        [[b1, conj(b4), conj(b5)],
         [b4, b2,       conj(b6)],
         [b5, b6,       b3      ]] @ x = r

    by Cramer's rule. All arguments are arrays of one common shape.
    Returns ``(x1, x2, x3, det)``.
    """
    c4, c5, c6 = np.conj(b4), np.conj(b5), np.conj(b6)
    # cofactors of the first column
    m11 = b2 * b3 - c6 * b6
    m21 = b4 * b3 - c6 * b5
    m31 = b4 * b6 - b2 * b5
    det = b1 * m11 - c4 * m21 + c5 * m31
    x1 = r1 * m11 - c4 * (r2 * b3 - c6 * r3) + c5 * (r2 * b6 - b2 * r3)
    x2 = b1 * (r2 * b3 - c6 * r3) - r1 * m21 + c5 * (b4 * r3 - r2 * b5)
    x3 = b1 * (b2 * r3 - r2 * b6) - c4 * (b4 * r3 - r2 * b5) + r1 * m31
    return x1 / det, x2 / det, x3 / det, det


def _simpson_hat_weights(fx0, fy0, fx1, fy1, length):
    """Exact integrals of the four bilinear hat functions along a cell segment."""
    fxm = 0.5 * (fx0 + fx1)
    fym = 0.5 * (fy0 + fy1)

    def simpson(f):
        return length / 6.0 * (f(fx0, fy0) + 4.0 * f(fxm, fym) + f(fx1, fy1))

    w00 = simpson(lambda a, b: (1.0 - a) * (1.0 - b))
    w01 = simpson(lambda a, b: a * (1.0 - b))
    w10 = simpson(lambda a, b: (1.0 - a) * b)
    w11 = simpson(lambda a, b: a * b)
    return w00, w01, w10, w11


def radon_triplets(n, cos_t, sin_t, det_pos):
    """Sparse weights of the ray-driven parallel-beam projector.

    Pixel ``(i, j)`` sits at ``x = j - c``, ``y = i - c`` with ``c = (n-1)/2``
    and the image is the bilinear interpolant of the pixel values on the
    square spanned by the pixel centres. Ray ``(a, k)`` is the line
    ``t_k (cos, sin) + s (-sin, cos)``; its weights are the exact line
    integrals of the hat functions, so every row sums to the chord length.

    Returns COO arrays ``(rows, cols, vals)`` with duplicates not merged.
    """
    c = 0.5 * (n - 1)
    lo, hi = -c, c
    grid = np.arange(n, dtype=float) - c
    n_det = len(det_pos)
    rows_all, cols_all, vals_all = [], [], []
    t = np.asarray(det_pos, dtype=float)
    for a in range(len(cos_t)):
        ct, st = float(cos_t[a]), float(sin_t[a])
        px, py = t * ct, t * st  # foot points, shape (n_det,)
        dx, dy = -st, ct
        # slab intersection with the interpolation square
        s_in = np.full(n_det, -np.inf)
        s_out = np.full(n_det, np.inf)
        inside = np.ones(n_det, dtype=bool)
        for p, d in ((px, dx), (py, dy)):
            if abs(d) < 1e-15:
                inside &= (p >= lo) & (p <= hi)
            else:
                s0 = (lo - p) / d
                s1 = (hi - p) / d
                s_in = np.maximum(s_in, np.minimum(s0, s1))
                s_out = np.minimum(s_out, np.maximum(s0, s1))
        inside &= s_out > s_in
        if not inside.any():
            continue
        idx = np.nonzero(inside)[0]
        px, py = px[idx], py[idx]
        s_in, s_out = s_in[idx], s_out[idx]
        parts = [s_in[:, None], s_out[:, None]]
        for p, d in ((px, dx), (py, dy)):
            if abs(d) >= 1e-15:
                parts.append((grid[None, :] - p[:, None]) / d)
        s = np.concatenate(parts, axis=1)
        s = np.clip(s, s_in[:, None], s_out[:, None])
        s.sort(axis=1)
        sa, sb = s[:, :-1], s[:, 1:]
        seg = sb - sa
        keep = seg > 1e-12
        ray = np.broadcast_to(idx[:, None], seg.shape)[keep]
        sa, sb, seg = sa[keep], sb[keep], seg[keep]
        pxr = np.broadcast_to(px[:, None], keep.shape)[keep]
        pyr = np.broadcast_to(py[:, None], keep.shape)[keep]
        sm = 0.5 * (sa + sb)
        xm = pxr + sm * dx - lo
        ym = pyr + sm * dy - lo
        cj = np.clip(np.floor(xm).astype(np.int64), 0, n - 2)
        ci = np.clip(np.floor(ym).astype(np.int64), 0, n - 2)
        fx0 = pxr + sa * dx - lo - cj
        fy0 = pyr + sa * dy - lo - ci
        fx1 = pxr + sb * dx - lo - cj
        fy1 = pyr + sb * dy - lo - ci
        w00, w01, w10, w11 = _simpson_hat_weights(fx0, fy0, fx1, fy1, seg)
        r = a * n_det + ray
        base = ci * n + cj
        rows_all.append(np.concatenate([r, r, r, r]))
        cols_all.append(np.concatenate([base, base + 1, base + n, base + n + 1]))
        vals_all.append(np.concatenate([w00, w01, w10, w11]))
    if not rows_all:
        empty = np.zeros(0)
        return empty.astype(np.int64), empty.astype(np.int64), empty
    return (
        np.concatenate(rows_all).astype(np.int64),
        np.concatenate(cols_all).astype(np.int64),
        np.concatenate(vals_all),
    )
