"""Undecimated multilevel transforms applied as Fourier multipliers.

Every transform here is a bank of periodic convolutions, so analysis is
``c_s = F^* (W_s * F u)`` for a stack of frequency responses ``W_s``. Both
transforms are translation invariant and ``F Psi^* Psi F^*`` is the diagonal
``sum_s |W_s|^2``.
"""

from dataclasses import dataclass

import numpy as np

from . import fft

# orthonormal lowpass filters (sum = sqrt 2)
_SQ3 = np.sqrt(3.0)
WAVELET_FILTERS = {
    "haar": np.array([1.0, 1.0]) / np.sqrt(2.0),
    "db2": np.array([1 + _SQ3, 3 + _SQ3, 3 - _SQ3, 1 - _SQ3]) / (4 * np.sqrt(2.0)),
    "db4": np.array(
        [
            0.23037781330889650,
            0.71484657055291540,
            0.63088076792985890,
            -0.02798376941685985,
            -0.18703481171909310,
            0.03084138183556076,
            0.03288301166688519,
            -0.01059740178506903,
        ]
    ),
}
_FAMILY_ALIASES = {
    "haar": "haar",
    "db1": "haar",
    "daubechies-2": "db2",
    "db2": "db2",
    "daubechies-4": "db4",
    "db4": "db4",
}


@dataclass(frozen=True)
class SubbandInfo:
    """Metadata of one subband: scale index, direction tag and size."""

    scale: int
    direction: str
    is_lowpass: bool
    size: int


class SubbandStack:
    """Analysis coefficients grouped into subbands.

    ``coeffs`` has shape ``(S, n, n)``; subband ``j`` is ``coeffs[j]`` and
    ``layout[j]`` describes it. Index 0 is the single lowpass subband.
    """

    __slots__ = ("coeffs", "layout")

    def __init__(self, coeffs, layout):
        coeffs = np.asarray(coeffs)
        layout = tuple(layout)
        if coeffs.ndim != 3 or coeffs.shape[0] != len(layout):
            raise ValueError(
                f"coefficient array {coeffs.shape} does not match a layout of "
                f"{len(layout)} subbands"
            )
        if not layout[0].is_lowpass or any(b.is_lowpass for b in layout[1:]):
            raise ValueError("exactly one lowpass subband, at index 0, is required")
        per_band = coeffs.shape[1] * coeffs.shape[2]
        if any(b.size != per_band for b in layout):
            raise ValueError("subband sizes do not match the coefficient array")
        self.coeffs = coeffs
        self.layout = layout

    def __len__(self):
        return len(self.layout)

    def __getitem__(self, j):
        return self.coeffs[j]

    @property
    def sizes(self):
        return np.array([b.size for b in self.layout])

    @property
    def total_size(self):
        return int(self.sizes.sum())

    def flat(self):
        """All coefficients as one vector, subband after subband."""
        return self.coeffs.reshape(-1)

    @classmethod
    def from_flat(cls, vec, layout):
        layout = tuple(layout)
        n = int(round(np.sqrt(layout[0].size)))
        vec = np.asarray(vec)
        if vec.size != sum(b.size for b in layout):
            raise ValueError("flat vector length does not match the layout")
        return cls(vec.reshape(len(layout), n, n), layout)

    def with_coeffs(self, coeffs):
        return SubbandStack(coeffs, self.layout)

    def zeros_like(self):
        return SubbandStack(np.zeros_like(self.coeffs), self.layout)

    def __repr__(self):
        return f"SubbandStack({len(self)} subbands, n={self.coeffs.shape[1]})"


class MultilevelTransform:
    """Translation-invariant frame given by frequency responses ``windows``.

    Parameters
    ----------
    windows : ndarray, shape (S, n, n)
        Frequency response of every subband on the unshifted DFT grid. Each
        response must be Hermitian so that real images give real coefficients.
    layout : sequence of SubbandInfo
    name : str
    """

    translation_invariant = True

    def __init__(self, windows, layout, name="transform"):
        windows = np.asarray(windows)
        self.n = windows.shape[-1]
        self.layout = tuple(layout)
        self.name = name
        self.windows = windows
        half = self.n // 2 + 1
        self._half = np.ascontiguousarray(windows[:, :, :half])
        self._half_conj = np.conj(self._half)
        self._gram = np.sum(np.abs(windows) ** 2, axis=0)
        spread = np.max(self._gram) - np.min(self._gram)
        mean = float(np.mean(self._gram))
        self.frame_bound = mean if spread <= 1e-12 * max(mean, 1.0) else None
        self.J = max(b.scale for b in self.layout)

    @property
    def is_tight(self):
        return self.frame_bound is not None

    @property
    def n_subbands(self):
        return len(self.layout)

    @property
    def total_size(self):
        return sum(b.size for b in self.layout)

    def _check_image(self, u):
        u = np.asarray(u)
        if u.shape != (self.n, self.n):
            raise ValueError(f"image shape {u.shape} does not match transform n={self.n}")
        return u

    def _coeff_array(self, c):
        arr = c.coeffs if isinstance(c, SubbandStack) else np.asarray(c)
        if isinstance(c, SubbandStack) and c.layout != self.layout:
            raise ValueError("subband layout does not match the transform")
        if arr.shape != (self.n_subbands, self.n, self.n):
            raise ValueError(
                f"coefficient shape {arr.shape} does not match "
                f"({self.n_subbands}, {self.n}, {self.n})"
            )
        return arr

    def analyze_array(self, u):
        """Analysis coefficients as a raw ``(S, n, n)`` array."""
        u = self._check_image(u)
        if np.isrealobj(u):
            return fft.irfft2(self._half * fft.rfft2(u), self.n)
        return fft.ifft2(self.windows * fft.fft2(u))

    def analyze(self, u):
        """Return the subband stack of ``u``."""
        return SubbandStack(self.analyze_array(u), self.layout)

    def adjoint_analyze(self, c):
        """Exact adjoint of :meth:`analyze`."""
        arr = self._coeff_array(c)
        if np.isrealobj(arr):
            spec = np.sum(self._half_conj * fft.rfft2(arr), axis=0)
            return fft.irfft2(spec, self.n)
        return fft.ifft2(np.sum(np.conj(self.windows) * fft.fft2(arr), axis=0))

    def synthesize(self, c):
        """Left inverse of :meth:`analyze` (``adjoint / a`` for tight frames)."""
        if self.is_tight:
            return self.adjoint_analyze(c) / self.frame_bound
        arr = self._coeff_array(c)
        spec = np.sum(np.conj(self.windows) * fft.fft2(arr), axis=0) / self._gram
        out = fft.ifft2(spec)
        return out.real if np.isrealobj(arr) else out

    def gram_fourier_diagonal(self):
        """Per-frequency multiplier ``g`` with ``F Psi^* Psi u = g * F u``."""
        if not self.translation_invariant:
            raise ValueError("transform is not translation invariant")
        return self._gram.copy()

    def __repr__(self):
        a = f"a={self.frame_bound:g}" if self.is_tight else "non-tight"
        return f"<{self.name} n={self.n} subbands={self.n_subbands} {a}>"


def _filter_response(taps, n, dilation):
    """DFT of ``taps`` upsampled by ``dilation`` (a trous) on a length-n circle."""
    h = np.zeros(n)
    for k, tap in enumerate(taps):
        h[(k * dilation) % n] += tap
    return np.fft.fft(h)


def build_wavelet(n, J, family="db2"):
    """Undecimated separable wavelet transform, normalized to a Parseval frame.

    Subband 0 is the lowpass at the coarsest level; then for scale
    ``1..J`` (coarse to fine) the three detail bands ``LH`` (highpass along x),
    ``HL`` (highpass along y) and ``HH``.
    """
    key = _FAMILY_ALIASES.get(str(family).lower())
    if key is None:
        raise ValueError(f"unknown wavelet family {family!r}")
    if J < 1 or n < 2 or n % (2**J) != 0:
        raise ValueError(f"n={n} must be divisible by 2**J with J={J} >= 1")
    h = WAVELET_FILTERS[key]
    L = len(h)
    g = np.array([(-1) ** k * h[L - 1 - k] for k in range(L)])
    # 1/sqrt(2) per filter makes |H|^2 + |G|^2 = 1
    h = h / np.sqrt(2.0)
    g = g / np.sqrt(2.0)

    low = np.ones(n, dtype=complex)
    details = []
    for level in range(J):
        Hj = _filter_response(h, n, 2**level)
        Gj = _filter_response(g, n, 2**level)
        lx, ly = low[None, :], low[:, None]
        scale = J - level
        details.append(
            [
                (scale, "LH", ly * lx * Hj[:, None] * Gj[None, :]),
                (scale, "HL", ly * lx * Gj[:, None] * Hj[None, :]),
                (scale, "HH", ly * lx * Gj[:, None] * Gj[None, :]),
            ]
        )
        low = low * Hj
    windows = [low[:, None] * low[None, :]]
    layout = [SubbandInfo(0, "lowpass", True, n * n)]
    for level_bands in reversed(details):
        for scale, direction, w in level_bands:
            windows.append(w)
            layout.append(SubbandInfo(scale, direction, False, n * n))
    return MultilevelTransform(np.array(windows), layout, name=f"wavelet-{key}")


def _meyer_step(x):
    """Smooth step: 0 for x <= 0, 1 for x >= 1, with v(x) + v(1 - x) = 1."""
    x = np.clip(x, 0.0, 1.0)
    return x**4 * (35 - 84 * x + 70 * x**2 - 20 * x**3)


def _lowpass_sq(x, R):
    """Squared 1-D Meyer lowpass: 1 for |x| <= R/2, 0 for |x| >= R."""
    return np.cos(0.5 * np.pi * _meyer_step(2.0 * np.abs(x) / R - 1.0)) ** 2


def _shear_bump(x):
    """Bump on [-1, 1] whose squared integer translates sum to one."""
    return np.cos(0.5 * np.pi * _meyer_step(np.abs(x)))


def build_shearlet(n, J, directions):
    """Band-limited cone-adapted shearlet frame with Parseval bound 1.

    Scale windows come from a telescoping family of Meyer lowpass filters, so
    their squares sum to one. Within scale ``j`` each of the two cones carries
    shears ``k = -2**d_j .. 2**d_j`` built from translates of a smooth bump in
    the slope variable; the directional windows are normalized to a partition
    of unity on the squared level, which makes the frame exactly Parseval.
    """
    directions = [int(d) for d in directions]
    if n < 32 or n & (n - 1):
        raise ValueError(f"shearlets need n a power of two >= 32, got {n}")
    if J < 1 or len(directions) != J:
        raise ValueError("directions must list one shear parameter per scale")
    if any(d < 0 for d in directions):
        raise ValueError("shear parameters must be nonnegative")

    freq = np.fft.fftfreq(n) * n
    w1 = freq[None, :]  # x frequency
    w2 = freq[:, None]  # y frequency
    W1 = np.broadcast_to(w1, (n, n))
    W2 = np.broadcast_to(w2, (n, n))

    radii = [0.5 * n * 2.0 ** (j - (J - 1)) for j in range(J)]

    def lowpass2_sq(R):
        return _lowpass_sq(W1, R) * _lowpass_sq(W2, R)

    big = 1e6
    with np.errstate(divide="ignore", invalid="ignore"):
        slope_h = np.where(W1 != 0, W2 / np.where(W1 == 0, 1, W1), big)
        slope_v = np.where(W2 != 0, W1 / np.where(W2 == 0, 1, W2), big)

    windows_sq = [lowpass2_sq(radii[0])]
    layout = [SubbandInfo(0, "lowpass", True, n * n)]
    prev = windows_sq[0]
    for j in range(J):
        nxt = lowpass2_sq(radii[j + 1]) if j + 1 < J else np.ones((n, n))
        band_sq = np.clip(nxt - prev, 0.0, None)
        prev = nxt
        K = 2 ** directions[j]
        dirs, tags = [], []
        for cone, slope in (("h", slope_h), ("v", slope_v)):
            for k in range(-K, K + 1):
                dirs.append(_shear_bump(K * slope - k) ** 2)
                tags.append(f"{cone}{k:+d}")
        total = np.sum(dirs, axis=0)
        total[total == 0] = 1.0  # only at the origin, where band_sq vanishes
        for d, tag in zip(dirs, tags):
            windows_sq.append(band_sq * d / total)
            layout.append(SubbandInfo(j + 1, tag, False, n * n))

    windows_sq = np.array(windows_sq)
    # even-symmetrize on the discrete grid so atoms are real; squares still sum to 1
    mirror = np.roll(windows_sq[:, ::-1, ::-1], 1, axis=(1, 2))
    windows = np.sqrt(0.5 * (windows_sq + mirror))
    return MultilevelTransform(windows.astype(complex), layout, name="shearlet")
