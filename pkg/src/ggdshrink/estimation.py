"""Per-subband estimates of noise level, clean-signal deviation and GGD shape."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from ggdshrink.ggd import log_kurtosis_ratio

MAD_NORMAL_QUARTILE = 0.6745
BETA_SEARCH = (0.05, 3.0)


@dataclass
class SubbandStats:
    """Estimates for one detail subband.

    ``threshold`` is ``math.inf`` when the subband is zeroed. ``beta_hat``
    is ``None`` when the rule does not need a shape or the clean variance
    estimate is zero.
    """

    name: str
    n: int
    mean: float
    var_noisy: float
    kurtosis: float
    sigma_ybar: float
    beta_hat: float | None
    threshold: float
    rule: str
    clamped: bool = False


def estimate_noise_mad(hh1_coeffs) -> float:
    """Robust noise deviation ``median(|c|) / 0.6745`` over the finest HH band."""
    c = np.asarray(hh1_coeffs, dtype=float).ravel()
    if c.size == 0:
        raise ValueError("MAD estimate needs at least one coefficient")
    return float(np.median(np.abs(c)) / MAD_NORMAL_QUARTILE)


def subband_stats(coeffs):
    """Mean, biased variance and sample kurtosis of a subband.

    The kurtosis uses ``M - 1`` in the denominator with the biased
    variance; it is ``nan`` for a constant subband.
    """
    y = np.asarray(coeffs, dtype=float).ravel()
    m = y.size
    if m < 4:
        raise ValueError(f"need at least 4 coefficients, got {m}")
    mean = float(y.mean())
    dev = y - mean
    d2 = dev * dev
    var = float(d2.mean())
    if var == 0.0:
        return mean, 0.0, math.nan
    kurt = float(np.dot(d2, d2) / ((m - 1) * var * var))
    return mean, var, kurt


def estimate_signal_sigma(var_noisy: float, sigma_w: float) -> float:
    """``sqrt(max(var_noisy - sigma_w**2, 0))``."""
    return math.sqrt(max(var_noisy - sigma_w * sigma_w, 0.0))


def estimate_beta_mme(kurtosis: float, var_noisy: float, sigma_w: float) -> float:
    """Shape estimate by matching the kurtosis of signal-plus-noise.

    Solves ``kurtosis_ratio(beta) = R`` with
    ``R = (k s_y^4 - 6 s_w^2 s_y^2 + 3 s_w^4) / (s_y^2 - s_w^2)^2``. ``R`` is
    clamped to the values attainable on ``[0.05, 3]`` first.
    """
    vy, vw = var_noisy, sigma_w * sigma_w
    if not vy > vw:
        raise ValueError(
            f"shape is unidentifiable: noisy variance {vy:g} <= noise variance {vw:g}"
        )
    target = (kurtosis * vy * vy - 6.0 * vw * vy + 3.0 * vw * vw) / (vy - vw) ** 2
    lo, hi = BETA_SEARCH
    # log-ratio is decreasing in beta
    top, bottom = log_kurtosis_ratio(lo), log_kurtosis_ratio(hi)
    lt = math.log(target) if target > 0 else -math.inf
    if lt >= top:
        return lo
    if lt <= bottom:
        return hi
    return bisect(lambda b: log_kurtosis_ratio(b) - lt, lo, hi, xtol=1e-13, rtol=1e-14)
