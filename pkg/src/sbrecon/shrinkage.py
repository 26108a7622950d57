"""Closed-form proximal maps used by the split subproblems."""

import numpy as np

from . import kernels
from .grid import TENSOR_MULTIPLICITY


def _check_lambda(lam):
    if np.any(np.asarray(lam) < 0):
        raise ValueError("threshold must be nonnegative")


def shrink(z, lam):
    """Soft-thresholding ``max(|z| - lam, 0) z / |z|`` (0 at ``z = 0``).

    Works for real and complex scalars or arrays; the phase is preserved.
    """
    _check_lambda(lam)
    scalar = np.isscalar(z)
    out = kernels.soft_threshold(np.atleast_1d(np.asarray(z)), lam)
    return out[0] if scalar else out


def shrink2(x, lam):
    """Isotropic shrinkage of 2-vectors along the leading axis of ``x``."""
    _check_lambda(lam)
    x = np.asarray(x)
    if x.shape[0] != 2:
        raise ValueError("shrink2 expects a leading axis of length 2")
    return kernels.group_soft_threshold(x, lam, (1.0, 1.0))


def shrinkF(x, lam):
    """Frobenius shrinkage of symmetric tensors stored as ``(xx, xy, yy)``.

    The off-diagonal entry counts twice in the norm, matching
    :func:`sbrecon.grid.tensor_l1_norm`.
    """
    _check_lambda(lam)
    x = np.asarray(x)
    if x.shape[0] != 3:
        raise ValueError("shrinkF expects a leading axis of length 3")
    return kernels.group_soft_threshold(x, lam, TENSOR_MULTIPLICITY)


def hard_threshold(c, delta):
    """Keep ``c[k]`` where ``|c[k]| > delta[k]`` and zero it elsewhere.

    ``c`` may be a :class:`~sbrecon.transforms.SubbandStack` or an array;
    ``delta`` must have the same layout.
    """
    from .transforms import SubbandStack

    if isinstance(c, SubbandStack):
        d = delta.coeffs if isinstance(delta, SubbandStack) else np.asarray(delta)
        if d.shape != c.coeffs.shape:
            raise ValueError("threshold layout does not match the coefficient stack")
        return c.with_coeffs(np.where(np.abs(c.coeffs) > d, c.coeffs, 0))
    c = np.asarray(c)
    d = np.asarray(delta)
    if d.shape != c.shape:
        raise ValueError("threshold layout does not match the coefficients")
    return np.where(np.abs(c) > d, c, 0)
