"""Image quality metrics."""

from __future__ import annotations

import math

import numpy as np
from scipy.ndimage import correlate1d

from ggdshrink.image import ImageBuffer

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def _check_pair(reference: ImageBuffer, test: ImageBuffer):
    if reference.pixels.shape != test.pixels.shape:
        raise ValueError(f"shape mismatch: {reference.pixels.shape} vs {test.pixels.shape}")
    if reference.bit_depth != test.bit_depth:
        raise ValueError(f"bit depth mismatch: {reference.bit_depth} vs {test.bit_depth}")


def mse(reference: ImageBuffer, test: ImageBuffer) -> float:
    _check_pair(reference, test)
    d = reference.pixels - test.pixels
    return float(np.mean(d * d))


def psnr_from_mse(err: float, peak: float) -> float:
    if err == 0:
        return math.inf
    return 10.0 * math.log10(peak * peak / err)


def psnr(reference: ImageBuffer, test: ImageBuffer) -> float:
    """PSNR in dB with peak ``2**B - 1``; ``inf`` for identical images."""
    return psnr_from_mse(mse(reference, test), reference.peak)


def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    """Normalised 1-D Gaussian taps; the 2-D window is their outer product."""
    r = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-r * r / (2.0 * sigma * sigma))
    return g / g.sum()


def _filter_valid(x, taps):
    # Separable filtering, then crop to positions where the window fits.
    h = taps.size // 2
    out = correlate1d(correlate1d(x, taps, axis=0, mode="nearest"), taps, axis=1, mode="nearest")
    return out[h:-h, h:-h]


def ssim(reference: ImageBuffer, test: ImageBuffer) -> float:
    """Mean SSIM with an 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03.

    Statistics are computed only where the window fits inside the image,
    and the dynamic range is ``2**B - 1``.
    """
    _check_pair(reference, test)
    if min(reference.pixels.shape) < SSIM_WINDOW:
        raise ValueError(f"SSIM needs images of at least {SSIM_WINDOW}x{SSIM_WINDOW}")
    x, y = reference.pixels, test.pixels
    if np.array_equal(x, y):
        return 1.0
    L = reference.peak
    c1 = (SSIM_K1 * L) ** 2
    c2 = (SSIM_K2 * L) ** 2
    win = gaussian_window()
    mx = _filter_valid(x, win)
    my = _filter_valid(y, win)
    sxx = _filter_valid(x * x, win) - mx * mx
    syy = _filter_valid(y * y, win) - my * my
    sxy = _filter_valid(x * y, win) - mx * my
    num = (2.0 * mx * my + c1) * (2.0 * sxy + c2)
    den = (mx * mx + my * my + c1) * (sxx + syy + c2)
    return float(np.mean(num / den))
