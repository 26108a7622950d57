"""Weight rules for the reweighted analysis l1 term and for IHT thresholds.

All rules take a :class:`~sbrecon.transforms.SubbandStack` (or a raw
``(S, n, n)`` array whose index 0 is the lowpass band).
"""

from dataclasses import dataclass

import numpy as np

from .transforms import SubbandStack

STRATEGIES = ("none", "irl1", "ml-max", "ml-quantile", "co-l1", "oracle")


def _coeffs(c):
    arr = c.coeffs if isinstance(c, SubbandStack) else np.asarray(c)
    if arr.ndim < 2:
        raise ValueError("expected a stack of subbands with the lowpass at index 0")
    return arr


def _band_abs(c):
    arr = _coeffs(c)
    return np.abs(arr).reshape(arr.shape[0], -1)


def _like(c, values):
    if isinstance(c, SubbandStack):
        return c.with_coeffs(values)
    return values


def _check_eps(eps):
    if not eps > 0:
        raise ValueError("epsilon must be positive")


@dataclass
class WeightSchedule:
    """Per-subband factors ``lam`` and per-coefficient weights ``w``.

    The effective soft threshold of coefficient ``l`` in subband ``j`` is
    ``lam[j] * w[j][l] / mu1``.
    """

    lam: np.ndarray
    w: np.ndarray
    epsilon: float
    strategy: str

    def thresholds(self, mu1):
        return self.lam[:, None, None] * self.w / mu1


def lambda_ml_max(c):
    """Largest coefficient modulus per subband; the lowpass entry is 0."""
    lam = _band_abs(c).max(axis=1)
    lam[0] = 0.0
    return lam


def lambda_ml_quantile(c, q):
    """Nearest-rank ``q``-quantile of the moduli per subband; lowpass entry 0.

    The nearest-rank quantile of ``N`` sorted values is the value at rank
    ``ceil(q N)``, so ``q = 1`` gives the maximum.
    """
    if not 0.0 < q <= 1.0:
        raise ValueError(f"quantile must be in (0, 1], got {q}")
    mags = np.sort(_band_abs(c), axis=1)
    rank = max(int(np.ceil(q * mags.shape[1] - 1e-12)), 1)
    lam = mags[:, rank - 1].copy()
    lam[0] = 0.0
    return lam


def weights_irl1(c, eps):
    """Elementwise reweighting ``1 / (eps + |c|)`` on every subband."""
    _check_eps(eps)
    arr = _coeffs(c)
    return _like(c, 1.0 / (eps + np.abs(arr)))


def lambda_co_l1(c, eps):
    """``N_j / (eps + ||c_j||_1)`` for every subband, lowpass included."""
    _check_eps(eps)
    mags = _band_abs(c)
    return mags.shape[1] / (eps + mags.sum(axis=1))


def oracle_weights(true_c, eps):
    """Weights frozen from known coefficients: ml-max factors with IRL1 weights."""
    w = weights_irl1(true_c, eps)
    w = w.coeffs if isinstance(w, SubbandStack) else w
    return WeightSchedule(lambda_ml_max(true_c), w, float(eps), "oracle")


def iht_strategy_f1(c, lam, eps):
    """Thresholds ``lam / (|c| + eps)`` with one ``lam`` for all subbands."""
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    _check_eps(eps)
    return _like(c, lam / (np.abs(_coeffs(c)) + eps))


def iht_strategy_f2(c, mu, eps):
    """Thresholds ``mu * max_j / (|c| + eps)`` with the max taken per subband."""
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    _check_eps(eps)
    arr = _coeffs(c)
    peak = _band_abs(c).max(axis=1).reshape((-1,) + (1,) * (arr.ndim - 1))
    return _like(c, mu * peak / (np.abs(arr) + eps))


def update_schedule(strategy, c, eps, quantile=0.9, const_lambda=1.0, frozen=None):
    """Weights for the current iterate under ``strategy``.

    ``none`` uses unit weights and ``const_lambda`` on every detail band;
    ``irl1`` keeps ``const_lambda`` but reweights elementwise; ``ml-max`` and
    ``ml-quantile`` combine the level factors with IRL1 weights; ``co-l1``
    uses the subband rule with unit weights; ``oracle`` returns ``frozen``.
    """
    arr = _coeffs(c)
    S = arr.shape[0]
    if strategy == "oracle":
        if frozen is None:
            raise ValueError("oracle strategy needs frozen weights")
        return frozen
    if strategy in ("none", "co-l1"):
        w = np.ones(arr.shape)
    elif strategy in ("irl1", "ml-max", "ml-quantile"):
        w = 1.0 / (eps + np.abs(arr))
    else:
        raise ValueError(f"unknown reweighting strategy {strategy!r}")
    if strategy in ("none", "irl1"):
        lam = np.full(S, float(const_lambda))
        lam[0] = 0.0
    elif strategy == "ml-max":
        lam = lambda_ml_max(arr)
    elif strategy == "ml-quantile":
        lam = lambda_ml_quantile(arr, quantile)
    else:
        lam = lambda_co_l1(arr, eps)
    return WeightSchedule(lam, w, float(eps), strategy)
