import math

import mpmath
import numpy as np
import pytest
from scipy import integrate

from ggdshrink.ggd import GgdModel, ggd_pdf, ggd_sample, kurtosis_ratio


def mp_pdf(sigma, beta, x):
    """Reference density in 50-digit arithmetic."""
    mpmath.mp.dps = 50
    s, b, x = mpmath.mpf(sigma), mpmath.mpf(beta), mpmath.mpf(x)
    alpha = mpmath.sqrt(mpmath.gamma(3 / b) / mpmath.gamma(1 / b)) / s
    c = b * alpha / (2 * mpmath.gamma(1 / b))
    return float(c * mpmath.exp(-(alpha * abs(x)) ** b))


def test_pdf_gaussian_at_zero():
    assert ggd_pdf(GgdModel(1.0, 2.0), 0.0) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-14)


def test_pdf_laplace_at_zero():
    assert ggd_pdf(GgdModel(1.0, 1.0), 0.0) == pytest.approx(math.sqrt(2) / 2, rel=1e-14)


def test_pdf_matches_high_precision_reference():
    assert ggd_pdf(GgdModel(2.0, 0.7), 1.3) == pytest.approx(mp_pdf(2.0, 0.7, 1.3), rel=1e-12)


@pytest.mark.parametrize("sigma,beta", [(1.0, 0.5), (2.0, 0.7), (0.3, 1.0), (5.0, 1.6), (1.0, 2.0)])
def test_pdf_normalised_with_variance_sigma2(sigma, beta):
    m = GgdModel(sigma, beta)
    f = lambda x: ggd_pdf(m, x)
    # Split at 0 for the cusp; heavy tails need a wide half-line.
    mass = 2 * integrate.quad(f, 0, np.inf, epsabs=0, epsrel=1e-12, limit=500)[0]
    second = 2 * integrate.quad(lambda x: x * x * f(x), 0, np.inf, epsabs=0, epsrel=1e-12, limit=500)[0]
    assert mass == pytest.approx(1.0, rel=1e-8)
    assert second == pytest.approx(sigma ** 2, rel=1e-6)


def test_pdf_symmetric(rng):
    m = GgdModel(1.7, 0.45)
    x = rng.normal(0, 5, 500)
    np.testing.assert_array_equal(ggd_pdf(m, x), ggd_pdf(m, -x))


@pytest.mark.parametrize("bad", [math.inf, -math.inf, math.nan])
def test_pdf_rejects_non_finite(bad):
    with pytest.raises(ValueError):
        ggd_pdf(GgdModel(1.0, 1.0), bad)


@pytest.mark.parametrize("sigma,beta", [(0.0, 1.0), (-1.0, 1.0), (1.0, -0.5), (1.0, 0.0)])
def test_model_rejects_bad_parameters(sigma, beta):
    with pytest.raises(ValueError):
        GgdModel(sigma, beta)


def test_sample_gaussian_moments():
    x = ggd_sample(GgdModel(1.0, 2.0), 10 ** 6, seed=1)
    var = x.var()
    kurt = np.mean((x - x.mean()) ** 4) / var ** 2
    assert var == pytest.approx(1.0, rel=0.01)
    assert kurt == pytest.approx(3.0, rel=0.03)


def test_sample_laplace_kurtosis():
    x = ggd_sample(GgdModel(1.0, 1.0), 10 ** 6, seed=2)
    kurt = np.mean((x - x.mean()) ** 4) / x.var() ** 2
    assert kurt == pytest.approx(6.0, rel=0.05)


def test_sample_deterministic():
    m = GgdModel(3.0, 0.6)
    np.testing.assert_array_equal(ggd_sample(m, 1000, 99), ggd_sample(m, 1000, 99))


def test_sample_empty():
    assert ggd_sample(GgdModel(1.0, 1.0), 0, 0).size == 0


def test_sample_ks_against_integrated_cdf():
    m = GgdModel(1.5, 0.6)
    x = np.sort(ggd_sample(m, 10 ** 5, seed=3))
    # CDF by quadrature of the density between consecutive grid points.
    grid = np.linspace(-40, 40, 4001)
    pieces = [integrate.quad(lambda t: ggd_pdf(m, t), a, b, points=[0.0] if a < 0 < b else None)[0]
              for a, b in zip(grid[:-1], grid[1:])]
    tail = integrate.quad(lambda t: ggd_pdf(m, t), -np.inf, grid[0])[0]
    cdf_grid = tail + np.concatenate([[0.0], np.cumsum(pieces)])
    cdf = np.interp(x, grid, cdf_grid)
    emp_hi = np.arange(1, x.size + 1) / x.size
    emp_lo = np.arange(0, x.size) / x.size
    ks = max(np.max(np.abs(emp_hi - cdf)), np.max(np.abs(cdf - emp_lo)))
    assert ks < 0.01


def test_kurtosis_ratio_known_values():
    assert kurtosis_ratio(1.0) == pytest.approx(6.0, rel=1e-10)
    assert kurtosis_ratio(2.0) == pytest.approx(3.0, rel=1e-10)


def test_kurtosis_ratio_half_against_mpmath():
    mpmath.mp.dps = 40
    b = mpmath.mpf("0.5")
    ref = mpmath.gamma(1 / b) * mpmath.gamma(5 / b) / mpmath.gamma(3 / b) ** 2
    assert kurtosis_ratio(0.5) == pytest.approx(float(ref), rel=1e-10)


def test_kurtosis_ratio_monotone():
    vals = [kurtosis_ratio(b) for b in np.linspace(0.05, 5, 200)]
    assert np.all(np.isfinite(vals))
    assert np.all(np.diff(vals) < 0)


@pytest.mark.parametrize("beta", [0.049, 5.01, -1.0])
def test_kurtosis_ratio_range(beta):
    with pytest.raises(ValueError):
        kurtosis_ratio(beta)
