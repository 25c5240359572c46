"""Posterior-mean (Bayes) estimate of a GGD coefficient in Gaussian noise."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import erfc, erfcx, log_ndtr

from ggdshrink.ggd import GgdModel, NoiseModel
from ggdshrink.quadrature import ConvergenceError, integrate

__all__ = [
    "ConvergenceError",
    "EstimatorConfig",
    "q_function",
    "scaled_exp_q",
    "bayes_estimate_numeric",
    "bayes_estimate_gaussian",
    "bayes_estimate_laplace",
    "posterior_moments",
    "asymptotic_slope",
]

_SQRT2 = math.sqrt(2.0)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
# Likelihood window half-width in units of sigma_w; exp(-72) is far below
# double-precision relevance.
_WINDOW = 12.0


@dataclass(frozen=True)
class EstimatorConfig:
    rel_tol: float = 1e-9
    max_subdivisions: int = 200
    slope_eval_multiple: float = 30.0

    def __post_init__(self):
        if not (0 < self.rel_tol <= 1e-3):
            raise ValueError(f"rel_tol must lie in (0, 1e-3], got {self.rel_tol!r}")
        if self.max_subdivisions < 10:
            raise ValueError("max_subdivisions must be at least 10")
        if not self.slope_eval_multiple > 0:
            raise ValueError("slope_eval_multiple must be positive")


DEFAULT_CONFIG = EstimatorConfig()


def q_function(x):
    """Upper tail of the standard normal, ``Q(x) = P(Z > x)``."""
    out = 0.5 * erfc(np.asarray(x, dtype=float) / _SQRT2)
    return float(out) if out.ndim == 0 else out


def log_q(x):
    return log_ndtr(-np.asarray(x, dtype=float))


def scaled_exp_q(a, b):
    """``exp(a) * Q(b)`` evaluated in the log domain so ``exp(a)`` never overflows."""
    out = np.exp(np.asarray(a, dtype=float) + log_q(b))
    return float(out) if out.ndim == 0 else out


def bayes_estimate_gaussian(theta, noise: NoiseModel, prior_sigma: float):
    """Wiener shrinkage, exact posterior mean for a Gaussian prior."""
    s2 = prior_sigma * prior_sigma
    return s2 / (s2 + noise.sigma_w * noise.sigma_w) * theta


def _log_erfcx(x):
    """``log(exp(x**2) erfc(x))`` without overflow for negative ``x``."""
    x = np.asarray(x, dtype=float)
    pos = np.maximum(x, 0.0)
    neg = np.minimum(x, 0.0)
    return np.where(x >= 0, np.log(erfcx(pos)), neg * neg + np.log(erfc(neg)))


def _laplace_positive(theta, w, s):
    # theta >= 0; oddness is imposed by the caller.
    # With ep = exp(k) Q(c + t) and em = exp(-k) Q(c - t) the estimate is
    # theta + (sqrt2 w^2 / s) * (ep - em) / (ep + em). The Gaussian parts of
    # log Q(c +- t) cancel against +-k exactly, so the log ratio reduces to a
    # difference of scaled complementary error functions.
    c = _SQRT2 * w / s
    t = theta / w
    d = _log_erfcx((c + t) / _SQRT2) - _log_erfcx((c - t) / _SQRT2)
    return theta + _SQRT2 * w * w / s * np.tanh(0.5 * d)


def bayes_estimate_laplace(theta, noise: NoiseModel, prior_sigma: float):
    """Closed-form posterior mean for a Laplace prior with std ``prior_sigma``.

    The two ``exp(+-sqrt(2) theta / s) Q(.)`` products enter only through
    their ratio, which is formed from scaled complementary error functions.
    This stays finite for ``|theta|`` far beyond ``exp`` overflow and avoids
    cancellation when the noise dominates the prior.
    """
    th = np.asarray(theta, dtype=float)
    out = np.sign(th) * _laplace_positive(np.abs(th), noise.sigma_w, prior_sigma)
    return float(out) if out.ndim == 0 else out


def _log_parts(theta, noise, prior):
    """Log-integrands on ``x >= 0`` after folding the negative half-line.

    With ``f`` even, the denominator integrand becomes
    ``f(x) [phi(theta - x) + phi(theta + x)]`` and the numerator
    ``x f(x) [phi(theta - x) - phi(theta + x)]``; both are non-negative,
    so there is no cancellation. Constants common to both are dropped.
    """
    w2 = noise.sigma_w ** 2
    beta = prior.beta
    la = prior.log_alpha

    def logs(x):
        with np.errstate(divide="ignore"):
            lx = np.log(x)
            base = -np.exp(beta * (la + lx)) - (x - theta) ** 2 / (2.0 * w2)
            u = 2.0 * x * theta / w2
            return base, lx, np.log1p(np.exp(-u)), np.log(-np.expm1(-u))

    def logs_offset(m, d):
        # Same as ``logs(m + d)`` minus its value of ``base`` at ``m``, written
        # in differences so that huge exponents cancel before rounding.
        x = m + d
        with np.errstate(divide="ignore", invalid="ignore"):
            if m > 0:
                am = math.exp(beta * (la + math.log(m)))
                prior_part = -am * np.expm1(beta * np.log1p(d / m))
            else:
                prior_part = -np.exp(beta * (la + np.log(d)))
            lik_part = -d * (2.0 * (m - theta) + d) / (2.0 * w2)
            u = 2.0 * x * theta / w2
            return (prior_part + lik_part, np.log(x),
                    np.log1p(np.exp(-u)), np.log(-np.expm1(-u)))

    return logs, logs_offset


def posterior_moments(theta: float, noise: NoiseModel, prior: GgdModel,
                      cfg: EstimatorConfig = DEFAULT_CONFIG):
    """Posterior mean ``E[x | theta]`` and marginal density ``p(theta)``.

    The marginal is the density of the noisy coefficient, i.e. the
    convolution of the prior with the noise density.
    """
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    sign = 1.0 if theta >= 0 else -1.0
    th = abs(theta)
    w = noise.sigma_w
    log_const = prior.log_norm - _LOG_SQRT_2PI - math.log(w)
    logs, logs_offset = _log_parts(th, noise, prior)
    upper = th + _WINDOW * w

    # Locate the peak of the denominator integrand; the posterior may be far
    # narrower than the probe spacing, so refine between neighbours.
    probe = np.linspace(0.0, upper, 257)
    base, _, lc, _ = logs(probe)
    ld = base + lc
    i = int(np.argmax(ld))
    mode = float(probe[i])
    if i > 0:
        def neg(x):
            bb, _, cc, _ = logs(np.array([x]))
            return -(bb[0] + cc[0])
        res = minimize_scalar(neg, bounds=(probe[i - 1], probe[min(i + 1, probe.size - 1)]),
                              method="bounded", options={"xatol": 1e-6 * w})
        if -res.fun > ld[i]:
            mode = float(res.x)
    base_mode = float(logs(np.array([mode]))[0][0])
    # exp(ld - shift) <= ~2 everywhere: base <= base_mode, cosh term <= log 2.
    shift = base_mode

    pts = [0.0, upper]
    for centre in {th, mode}:
        for k in (-_WINDOW, -6.0, -2.0, 0.0, 2.0, 6.0):
            p = centre + k * w
            if 0.0 < p < upper:
                pts.append(p)
    lowest = min(p for p in pts if p > 0)
    pts.extend(lowest * 10.0 ** -np.arange(1, 4))  # towards the cusp at 0
    d_pts = np.unique(np.asarray(pts) - mode)

    if th == 0.0:
        def func(d):
            rel, _, lc, _ = logs_offset(mode, d)
            return np.exp(rel + lc)[None, :]
    else:
        def func(d):
            rel, lx, lc, ls = logs_offset(mode, d)
            return np.vstack([np.exp(rel + lc), np.exp(rel + lx + ls)])

    vals, _ = integrate(func, d_pts, rel_tol=cfg.rel_tol, max_intervals=cfg.max_subdivisions)
    marginal = vals[0] * math.exp(shift + log_const)
    if th == 0.0:
        return 0.0, marginal
    return sign * vals[1] / vals[0], marginal


def bayes_estimate_numeric(theta: float, noise: NoiseModel, prior: GgdModel,
                           cfg: EstimatorConfig = DEFAULT_CONFIG) -> float:
    """Posterior mean of the clean coefficient by adaptive quadrature.

    Raises
    ------
    ConvergenceError
        If the quadrature cannot meet ``cfg.rel_tol`` within
        ``cfg.max_subdivisions`` subintervals.
    """
    return posterior_moments(theta, noise, prior, cfg)[0]


def asymptotic_slope(noise: NoiseModel, prior: GgdModel,
                     cfg: EstimatorConfig = DEFAULT_CONFIG) -> float:
    """Central-difference slope of the Bayes estimate far from the knee."""
    t0 = cfg.slope_eval_multiple * noise.sigma_w
    h = noise.sigma_w / 10.0
    hi = bayes_estimate_numeric(t0 + h, noise, prior, cfg)
    lo = bayes_estimate_numeric(t0 - h, noise, prior, cfg)
    return (hi - lo) / (2.0 * h)
