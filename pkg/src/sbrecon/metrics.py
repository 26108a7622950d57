"""Relative error and structural similarity."""

import numpy as np

WINDOW = 8


def relative_error(ref, rec):
    """``||ref - rec||_2 / ||ref||_2`` over all pixels (complex values allowed)."""
    ref = np.asarray(ref)
    rec = np.asarray(rec)
    if ref.shape != rec.shape:
        raise ValueError(f"shape mismatch: {ref.shape} vs {rec.shape}")
    den = np.linalg.norm(ref.ravel())
    if den == 0:
        raise ValueError("reference image is identically zero")
    return float(np.linalg.norm((ref - rec).ravel()) / den)


def _window_sums(a, k):
    # integral image with a zero border, then box sums over all valid k x k windows
    s = np.zeros((a.shape[0] + 1, a.shape[1] + 1))
    s[1:, 1:] = a.cumsum(0).cumsum(1)
    return s[k:, k:] - s[:-k, k:] - s[k:, :-k] + s[:-k, :-k]


def ssim_map(ref, rec, data_range=None, window=WINDOW):
    """Local SSIM over every ``window x window`` patch fully inside the image.

    Uniform windows, population (co)variances and ``C1 = (0.01 L)**2``,
    ``C2 = (0.03 L)**2``. ``L`` defaults to the dynamic range of ``ref``
    (1 for a constant reference). Complex inputs are compared by modulus.
    """
    ref = np.asarray(ref)
    rec = np.asarray(rec)
    if ref.shape != rec.shape:
        raise ValueError(f"shape mismatch: {ref.shape} vs {rec.shape}")
    if ref.ndim != 2 or min(ref.shape) < window:
        raise ValueError(f"images must be 2-D and at least {window} pixels per side")
    x = np.abs(ref) if np.iscomplexobj(ref) else ref.astype(float)
    y = np.abs(rec) if np.iscomplexobj(rec) else rec.astype(float)
    if data_range is None:
        data_range = float(x.max() - x.min()) or 1.0
    c1 = (0.01 * data_range) ** 2
    c2 = (0.03 * data_range) ** 2
    # shift both by a common offset so the second moments do not cancel badly
    off = 0.5 * (x.mean() + y.mean())
    x = x - off
    y = y - off
    area = float(window * window)
    mx = _window_sums(x, window) / area
    my = _window_sums(y, window) / area
    vx = _window_sums(x * x, window) / area - mx * mx
    vy = _window_sums(y * y, window) / area - my * my
    cxy = _window_sums(x * y, window) / area - mx * my
    mx = mx + off
    my = my + off
    num = (2 * mx * my + c1) * (2 * cxy + c2)
    den = (mx * mx + my * my + c1) * (vx + vy + c2)
    return num / den


def ssim(ref, rec, data_range=None):
    """Mean SSIM with uniform 8x8 windows; see :func:`ssim_map`."""
    return float(np.mean(ssim_map(ref, rec, data_range)))
