"""Unitary 2-D FFTs over the last two axes, with a process-wide worker count."""

import scipy.fft as _sfft

_workers = 1


def set_threads(n):
    """Set the number of FFT worker threads (1 gives bit-exact reruns)."""
    global _workers
    _workers = max(1, int(n))


def get_threads():
    return _workers


def fft2(x):
    return _sfft.fft2(x, norm="ortho", workers=_workers)


def ifft2(x):
    return _sfft.ifft2(x, norm="ortho", workers=_workers)


def rfft2(x):
    return _sfft.rfft2(x, norm="ortho", workers=_workers)


def irfft2(x, n):
    return _sfft.irfft2(x, s=(n, n), norm="ortho", workers=_workers)
