"""Orthonormal separable 2-D Haar transform.

Subband naming: the first letter is the filter applied along columns
(horizontal direction), the second along rows. ``HL`` therefore holds
horizontal detail (vertical edges) and ``LH`` vertical detail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ggdshrink.image import ImageBuffer

_R2 = 1.0 / math.sqrt(2.0)

# Analysis filters; kept as data so another orthonormal pair could be added.
HAAR_LOW = np.array([_R2, _R2])
HAAR_HIGH = np.array([_R2, -_R2])

BANDS = ("LH", "HL", "HH")


@dataclass
class WaveletPyramid:
    """Multi-level decomposition; ``details[k-1]`` holds level ``k`` (finest is 1)."""

    approx: np.ndarray
    details: list
    original_dims: tuple
    bit_depth: int = field(default=8)

    @property
    def levels(self) -> int:
        return len(self.details)

    def band(self, level: int, name: str) -> np.ndarray:
        return self.details[level - 1][BANDS.index(name)]

    def subbands(self):
        """Yield ``(level, name, array)`` for every detail subband, finest first."""
        for k, bands in enumerate(self.details, start=1):
            for name, arr in zip(BANDS, bands):
                yield k, name, arr

    def map_details(self, fn) -> "WaveletPyramid":
        """New pyramid with ``fn(level, name, array)`` applied to each detail band."""
        details = [tuple(fn(k, n, a) for n, a in zip(BANDS, bands))
                   for k, bands in enumerate(self.details, start=1)]
        return WaveletPyramid(self.approx.copy(), details, self.original_dims, self.bit_depth)

    def coefficient_count(self) -> int:
        return self.approx.size + sum(a.size for _, _, a in self.subbands())

    def energy(self) -> float:
        return float(np.sum(self.approx ** 2) + sum(np.sum(a ** 2) for _, _, a in self.subbands()))

    def packed(self) -> np.ndarray:
        """Coefficients in the usual nested-quadrant layout (LL top-left)."""
        out = np.empty(self.original_dims)
        r, c = self.approx.shape
        out[:r, :c] = self.approx
        for k in range(self.levels, 0, -1):
            lh, hl, hh = self.details[k - 1]
            r, c = hh.shape
            out[:r, c:2 * c] = hl
            out[r:2 * r, :c] = lh
            out[r:2 * r, c:2 * c] = hh
        return out

    @classmethod
    def from_packed(cls, arr, levels: int, bit_depth: int = 8) -> "WaveletPyramid":
        arr = np.asarray(arr, dtype=float)
        _check_divisible(arr.shape, levels)
        details = []
        for k in range(1, levels + 1):
            r, c = arr.shape[0] >> k, arr.shape[1] >> k
            details.append((arr[r:2 * r, :c].copy(), arr[:r, c:2 * c].copy(),
                            arr[r:2 * r, c:2 * c].copy()))
        r, c = arr.shape[0] >> levels, arr.shape[1] >> levels
        return cls(arr[:r, :c].copy(), details, arr.shape, bit_depth)


def _check_divisible(shape, levels):
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    step = 2 ** levels
    rows, cols = shape
    if rows % step or cols % step:
        raise ValueError(
            f"image dimensions {rows}x{cols} must be divisible by 2**levels = {step} "
            f"for a {levels}-level transform"
        )


def _analyse(x, axis):
    x = np.moveaxis(x, axis, 0)
    a, b = x[0::2], x[1::2]
    lo = HAAR_LOW[0] * a + HAAR_LOW[1] * b
    hi = HAAR_HIGH[0] * a + HAAR_HIGH[1] * b
    return np.moveaxis(lo, 0, axis), np.moveaxis(hi, 0, axis)


def _synthesise(lo, hi, axis):
    lo = np.moveaxis(lo, axis, 0)
    hi = np.moveaxis(hi, axis, 0)
    out = np.empty((2 * lo.shape[0],) + lo.shape[1:])
    out[0::2] = HAAR_LOW[0] * lo + HAAR_HIGH[0] * hi
    out[1::2] = HAAR_LOW[1] * lo + HAAR_HIGH[1] * hi
    return np.moveaxis(out, 0, axis)


def dwt2_forward(image: ImageBuffer, levels: int = 5) -> WaveletPyramid:
    """Decompose ``image`` into ``levels`` Haar levels. The input is not modified."""
    _check_divisible(image.pixels.shape, levels)
    ll = image.pixels.copy()
    details = []
    for _ in range(levels):
        lo, hi = _analyse(ll, axis=1)
        ll, lh = _analyse(lo, axis=0)
        hl, hh = _analyse(hi, axis=0)
        details.append((lh, hl, hh))
    return WaveletPyramid(ll, details, image.pixels.shape, image.bit_depth)


def dwt2_inverse(pyramid: WaveletPyramid) -> ImageBuffer:
    """Reconstruct the image from a pyramid."""
    ll = np.asarray(pyramid.approx, dtype=float)
    for k in range(pyramid.levels, 0, -1):
        lh, hl, hh = pyramid.details[k - 1]
        if not (ll.shape == lh.shape == hl.shape == hh.shape):
            raise ValueError(
                f"inconsistent subband shapes at level {k}: LL{ll.shape} "
                f"LH{lh.shape} HL{hl.shape} HH{hh.shape}"
            )
        lo = _synthesise(ll, lh, axis=0)
        hi = _synthesise(hl, hh, axis=0)
        ll = _synthesise(lo, hi, axis=1)
    if ll.shape != tuple(pyramid.original_dims):
        raise ValueError(f"reconstructed shape {ll.shape} != original {pyramid.original_dims}")
    return ImageBuffer(ll, pyramid.bit_depth)
