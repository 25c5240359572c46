import math

import numpy as np
import pytest
from skimage.metrics import structural_similarity

from ggdshrink.image import ImageBuffer
from ggdshrink.metrics import mse, psnr, psnr_from_mse, ssim


def reference_ssim(x, y, bit_depth=8):
    return structural_similarity(x, y, gaussian_weights=True, sigma=1.5,
                                 use_sample_covariance=False, data_range=2 ** bit_depth - 1)


def test_psnr_identical_is_inf():
    img = ImageBuffer(np.full((8, 8), 3.0))
    assert psnr(img, img) == math.inf


def test_psnr_arithmetic():
    assert psnr_from_mse(1.0, 255) == pytest.approx(10 * math.log10(255 ** 2))
    assert psnr_from_mse(1.0, 255) == pytest.approx(48.13, abs=5e-3)
    assert psnr_from_mse(100.0, 65535) == pytest.approx(76.33, abs=5e-3)


def test_psnr_sixteen_bit_image():
    a = ImageBuffer(np.zeros((4, 4)), 16)
    b = ImageBuffer(np.full((4, 4), 10.0), 16)
    assert mse(a, b) == 100.0
    assert psnr(a, b) == pytest.approx(10 * math.log10(65535 ** 2 / 100))


def test_psnr_decreasing_in_mse():
    vals = [psnr_from_mse(m, 255) for m in np.geomspace(1e-3, 1e4, 50)]
    assert np.all(np.diff(vals) < 0)


def test_mismatched_pairs_rejected():
    with pytest.raises(ValueError):
        psnr(ImageBuffer(np.zeros((4, 4))), ImageBuffer(np.zeros((4, 5))))
    with pytest.raises(ValueError):
        psnr(ImageBuffer(np.zeros((4, 4)), 8), ImageBuffer(np.zeros((4, 4)), 16))


def test_ssim_identical():
    img = ImageBuffer(np.random.default_rng(0).uniform(0, 255, (32, 32)))
    assert ssim(img, img) == 1.0


def test_ssim_undersized():
    with pytest.raises(ValueError):
        ssim(ImageBuffer(np.zeros((10, 40))), ImageBuffer(np.ones((10, 40))))


def test_ssim_constant_offset_against_reference():
    x = np.full((32, 32), 100.0)
    got = ssim(ImageBuffer(x), ImageBuffer(x + 1))
    assert got == pytest.approx(reference_ssim(x, x + 1), rel=1e-12)


@pytest.mark.parametrize("bit_depth", [8, 16])
def test_ssim_random_against_reference(rng, bit_depth):
    peak = 2 ** bit_depth - 1
    x = rng.uniform(0, peak, (64, 48))
    y = np.clip(x + rng.normal(0, 0.1 * peak, x.shape), 0, peak)
    got = ssim(ImageBuffer(x, bit_depth), ImageBuffer(y, bit_depth))
    assert got == pytest.approx(reference_ssim(x, y, bit_depth), rel=1e-10)


def test_ssim_monotone_noise_ladder(rng):
    yy, xx = np.mgrid[0:128, 0:128]
    x = 128 + 60 * np.sin(xx / 9.0) * np.cos(yy / 13.0)
    noise = rng.normal(size=x.shape)
    vals = [ssim(ImageBuffer(x), ImageBuffer(x + s * noise)) for s in (2, 5, 10, 20, 40)]
    assert np.all(np.diff(vals) < 0)
    assert all(-1 <= v <= 1 for v in vals)
