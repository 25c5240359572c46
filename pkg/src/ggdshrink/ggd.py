"""Zero-mean generalized Gaussian prior and its moment helpers."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

# Shape range over which the kurtosis ratio is finite in double precision
# and still resolvable by bisection.
KURTOSIS_BETA_MIN = 0.05
KURTOSIS_BETA_MAX = 5.0


@dataclass(frozen=True)
class GgdModel:
    """GGD prior with standard deviation ``sigma`` and shape ``beta``.

    ``beta = 2`` is the Gaussian and ``beta = 1`` the Laplace density;
    the variance is ``sigma**2`` for every shape.
    """

    sigma: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"sigma must be positive and finite, got {self.sigma!r}")
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise ValueError(f"beta must be positive and finite, got {self.beta!r}")

    @property
    def log_alpha(self) -> float:
        # alpha = sigma^-1 * sqrt(G(3/b) / G(1/b))
        b = self.beta
        return 0.5 * (gammaln(3.0 / b) - gammaln(1.0 / b)) - math.log(self.sigma)

    @property
    def alpha(self) -> float:
        return math.exp(self.log_alpha)

    @property
    def log_norm(self) -> float:
        """log C with C = beta * alpha / (2 Gamma(1/beta))."""
        b = self.beta
        return math.log(b) + self.log_alpha - math.log(2.0) - gammaln(1.0 / b)

    @property
    def norm(self) -> float:
        return math.exp(self.log_norm)

    def log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        return self.log_norm - np.exp(self.beta * (self.log_alpha + np.log(np.abs(x))))


@dataclass(frozen=True)
class NoiseModel:
    """Additive white Gaussian noise with standard deviation ``sigma_w``."""

    sigma_w: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma_w) and self.sigma_w > 0):
            raise ValueError(f"sigma_w must be positive and finite, got {self.sigma_w!r}")


def ggd_pdf(model: GgdModel, x):
    """Density ``C exp(-(alpha |x|)^beta)`` of ``model`` at ``x``.

    Accepts a scalar or an array; returns the same shape. Non-finite
    input raises ``ValueError``.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("ggd_pdf requires finite x")
    with np.errstate(divide="ignore"):
        out = np.exp(model.log_pdf(arr))
    return float(out) if out.ndim == 0 else out


def ggd_sample(model: GgdModel, n: int, seed) -> np.ndarray:
    """Draw ``n`` i.i.d. samples as ``sign * a * G**(1/beta)``.

    ``G`` is a unit-scale gamma variate with shape ``1/beta`` and
    ``a = 1/alpha``. ``seed`` is anything accepted by
    :func:`numpy.random.default_rng` (an int, a ``SeedSequence`` or a
    ``Generator``).
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    rng = np.random.default_rng(seed)
    if n == 0:
        return np.empty(0)
    g = rng.standard_gamma(1.0 / model.beta, size=n)
    sign = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    return sign * (g ** (1.0 / model.beta)) / model.alpha


def log_kurtosis_ratio(beta: float) -> float:
    return gammaln(1.0 / beta) + gammaln(5.0 / beta) - 2.0 * gammaln(3.0 / beta)


def kurtosis_ratio(beta: float) -> float:
    """Kurtosis of a GGD with shape ``beta``: G(1/b) G(5/b) / G(3/b)^2.

    Defined on ``[0.05, 5]``; strictly decreasing there.
    """
    if not (KURTOSIS_BETA_MIN <= beta <= KURTOSIS_BETA_MAX):
        raise ValueError(
            f"beta={beta!r} outside supported range "
            f"[{KURTOSIS_BETA_MIN}, {KURTOSIS_BETA_MAX}]"
        )
    return math.exp(log_kurtosis_ratio(beta))
