"""Deterministic test images with values in [0, 1]."""

import numpy as np

# modified Shepp-Logan: intensity, semi-axes a, b, centre x0, y0, angle (deg)
_SHEPP_LOGAN = (
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
    (-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
    (-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
    (0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
    (0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
    (0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
    (0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
    (0.1, 0.023, 0.023, 0.0, -0.606, 0.0),
    (0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
)


def _coords(n):
    ax = (np.arange(n) - 0.5 * (n - 1)) / (0.5 * (n - 1))
    x, y = np.meshgrid(ax, -ax)  # row 0 is the top of the image
    return x, y


def shepp_logan(n):
    """Modified Shepp-Logan head phantom, sampled at pixel centres, clipped to [0, 1]."""
    x, y = _coords(n)
    img = np.zeros((n, n))
    for rho, a, b, x0, y0, deg in _SHEPP_LOGAN:
        phi = np.deg2rad(deg)
        xr = (x - x0) * np.cos(phi) + (y - y0) * np.sin(phi)
        yr = -(x - x0) * np.sin(phi) + (y - y0) * np.cos(phi)
        img[(xr / a) ** 2 + (yr / b) ** 2 <= 1.0] += rho
    return np.clip(img, 0.0, 1.0)


def piecewise_affine(n):
    """Constant and linear-ramp regions on a zero background."""
    x, y = _coords(n)
    img = np.zeros((n, n))
    box = (np.abs(x) < 0.75) & (np.abs(y) < 0.75)
    img[box] = 0.3 + 0.25 * x[box]
    disk = (x + 0.3) ** 2 + (y - 0.3) ** 2 < 0.25**2
    img[disk] = 0.9
    tri = (y < -0.1) & (y > -0.65) & (x > 0.05) & (x - 0.05 < (y + 0.65) * 1.1)
    img[tri] = 0.45 - 0.3 * y[tri]
    sq = (np.abs(x - 0.45) < 0.15) & (np.abs(y - 0.4) < 0.15)
    img[sq] = 0.15
    return np.clip(img, 0.0, 1.0)


def texture_mix(n):
    """Piecewise-affine content plus a smoothly windowed low-amplitude oscillation.

    The flat and ramp regions are sparse for wavelets and ideal for a
    second-order regularizer; the oscillating patch is neither.
    """
    img = piecewise_affine(n)
    x, y = _coords(n)
    cx, cy, r = -0.4, -0.4, 0.22
    rad = np.hypot(x - cx, y - cy) / r
    window = np.where(rad < 1.0, np.cos(0.5 * np.pi * rad) ** 2, 0.0)
    # period of about n/16 pixels, diagonal orientation
    k = 2.0 * np.pi * n / 16.0 / 2.0
    wave = np.cos(k * (x + 0.5 * y))
    img = img + 0.08 * window * wave
    return np.clip(img, 0.0, 1.0)


PHANTOMS = {
    "shepp-logan": shepp_logan,
    "piecewise-affine": piecewise_affine,
    "texture-mix": texture_mix,
}


def make_phantom(name, n):
    if n < 32:
        raise ValueError(f"phantom side must be >= 32, got {n}")
    try:
        fn = PHANTOMS[name]
    except KeyError:
        raise ValueError(f"unknown phantom {name!r}; choose from {sorted(PHANTOMS)}") from None
    return fn(int(n))
