"""Measurement operators: subsampled Fourier, parallel-beam Radon, pixel masks.

Every operator maps an ``(n, n)`` image to a flat measurement vector of
length ``m`` and back. Operators whose normal operator ``A^*A`` is a Fourier
multiplier expose it as ``fourier_diagonal``; the linear solver uses that to
pick the direct per-frequency path.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import fft, kernels
from .grid import check_image
from .io import read_mask, write_mask  # noqa: F401  (re-exported)


class SamplingOperator:
    """Base class. Subclasses set ``n``, ``m`` and implement forward/adjoint."""

    n = None
    m = None
    fourier_diagonal = None
    pixel_diagonal = None
    # A^*A maps real images to real images
    real_preserving = True
    name = "operator"

    def forward(self, u):
        raise NotImplementedError

    def adjoint(self, y):
        raise NotImplementedError

    def normal(self, u):
        """Apply ``A^*A``."""
        if self.fourier_diagonal is not None:
            out = fft.ifft2(self.fourier_diagonal * fft.fft2(u))
            return out.real if np.isrealobj(u) and self.real_preserving else out
        return self.adjoint(self.forward(u))

    def _check(self, u):
        u = check_image(u)
        if u.shape[0] != self.n:
            raise ValueError(f"image side {u.shape[0]} does not match operator n={self.n}")
        return u

    def _check_meas(self, y):
        y = np.asarray(y).reshape(-1)
        if y.size != self.m:
            raise ValueError(f"measurement length {y.size} does not match m={self.m}")
        return y

    def __repr__(self):
        return f"<{self.name} n={self.n} m={self.m}>"


@dataclass
class RadialMask:
    """Radial k-space lines, stored on the unshifted DFT grid."""

    n: int
    line_count: int
    mask: np.ndarray

    @property
    def sampling_rate(self):
        return float(self.mask.sum()) / self.mask.size

    def centered(self):
        """Mask with the DC frequency in the middle, for display."""
        return np.fft.fftshift(self.mask)


def _conjugate_flip(mask):
    # index k <-> (n - k) mod n on both axes
    return np.roll(mask[::-1, ::-1], 1, axis=(0, 1))


def make_radial_mask(n, line_count, seed=None):
    """Equiangular radial lines through the k-space origin.

    Each line is rasterized along its dominant axis with one pixel per
    row or column (nearest pixel), so a single line covers ``n`` pixels. The
    mask is made conjugate symmetric, so real images have real ``A^*A u``.
    ``seed`` rotates the whole line set by a random offset; ``None`` keeps
    the first line horizontal.
    """
    n = int(n)
    if not 1 <= line_count <= n:
        raise ValueError(f"line_count must be in [1, {n}], got {line_count}")
    offset = 0.0
    if seed is not None:
        offset = np.random.default_rng(seed).uniform(0.0, np.pi / line_count)
    c = n // 2
    centered = np.zeros((n, n), dtype=bool)
    ax = np.arange(n) - c
    for i in range(line_count):
        theta = offset + i * np.pi / line_count
        ct, st = np.cos(theta), np.sin(theta)
        if abs(ct) >= abs(st):
            rows = np.rint(c + ax * st / ct).astype(int)
            ok = (rows >= 0) & (rows < n)
            centered[rows[ok], (ax + c)[ok]] = True
        else:
            cols = np.rint(c + ax * ct / st).astype(int)
            ok = (cols >= 0) & (cols < n)
            centered[(ax + c)[ok], cols[ok]] = True
    mask = np.fft.ifftshift(centered)
    mask |= _conjugate_flip(mask)
    mask[0, 0] = True
    return RadialMask(n=n, line_count=int(line_count), mask=mask)


def random_pixel_mask(n, keep, seed=0):
    """Boolean mask keeping a fraction ``keep`` of the pixels, chosen at random."""
    if not 0.0 < keep <= 1.0:
        raise ValueError("keep fraction must be in (0, 1]")
    rng = np.random.default_rng(seed)
    count = int(round(keep * n * n))
    mask = np.zeros(n * n, dtype=bool)
    mask[rng.permutation(n * n)[:count]] = True
    return mask.reshape(n, n)


class FourierOperator(SamplingOperator):
    """``A = P F``: unitary 2-D DFT followed by selection of masked frequencies."""

    name = "fourier"

    def __init__(self, mask):
        if isinstance(mask, RadialMask):
            self.radial = mask
            mask = mask.mask
        else:
            self.radial = None
        mask = np.asarray(mask, dtype=bool)
        check_image(mask, "mask")
        self.mask = mask
        self.n = mask.shape[0]
        self.m = int(mask.sum())
        self._idx = np.flatnonzero(mask)
        self.fourier_diagonal = mask.astype(float)
        self.real_preserving = bool(np.array_equal(mask, _conjugate_flip(mask)))

    def forward(self, u):
        u = self._check(u)
        return fft.fft2(u).reshape(-1)[self._idx]

    def adjoint(self, y):
        y = self._check_meas(y)
        full = np.zeros(self.n * self.n, dtype=complex)
        full[self._idx] = y
        return fft.ifft2(full.reshape(self.n, self.n))


def fourier_operator(mask):
    return FourierOperator(mask)


class RadonOperator(SamplingOperator):
    """Parallel-beam Radon transform over ``angle_count`` angles in ``[0, pi)``.

    The image is the bilinear interpolant of its pixel values; each ray's
    weights are exact line integrals of that interpolant, stored once as a
    sparse matrix. The adjoint is the transpose of the same matrix.
    """

    name = "radon"

    def __init__(self, n, angle_count):
        if angle_count < 1:
            raise ValueError("angle_count must be >= 1")
        self.n = int(n)
        self.angle_count = int(angle_count)
        self.angles = np.arange(angle_count) * np.pi / angle_count
        self.n_det = int(np.ceil(np.sqrt(2.0) * n))
        self.det_pos = np.arange(self.n_det) - 0.5 * (self.n_det - 1)
        rows, cols, vals = kernels.radon_triplets(
            self.n, np.cos(self.angles), np.sin(self.angles), self.det_pos
        )
        self.m = self.angle_count * self.n_det
        self.matrix = sp.csr_matrix((vals, (rows, cols)), shape=(self.m, self.n * self.n))
        self.matrix.sum_duplicates()
        self._mt = self.matrix.T.tocsr()

    def forward(self, u):
        u = self._check(u)
        return self.matrix @ u.reshape(-1)

    def adjoint(self, y):
        y = self._check_meas(y)
        return (self._mt @ y).reshape(self.n, self.n)

    def sinogram(self, y):
        """Reshape a measurement vector to ``(angle_count, n_det)``."""
        return self._check_meas(y).reshape(self.angle_count, self.n_det)


def radon_operator(n, angle_count):
    return RadonOperator(n, angle_count)


class InpaintingOperator(SamplingOperator):
    """Pixel masking. ``A`` zeroes the missing pixels, so ``m = n**2`` and ``A^*A = A``."""

    name = "inpaint"

    def __init__(self, mask):
        mask = np.asarray(mask, dtype=bool)
        check_image(mask, "mask")
        self.mask = mask
        self.n = mask.shape[0]
        self.m = self.n * self.n
        self.pixel_diagonal = mask.astype(float)

    def forward(self, u):
        u = self._check(u)
        return (self.pixel_diagonal * u).reshape(-1)

    def adjoint(self, y):
        y = self._check_meas(y)
        return self.pixel_diagonal * y.reshape(self.n, self.n)

    def normal(self, u):
        return self.pixel_diagonal * u


def inpainting_operator(mask):
    return InpaintingOperator(mask)
