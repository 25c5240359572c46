"""2-D raster with bit-depth metadata."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class ImageBuffer:
    pixels: np.ndarray
    bit_depth: int = 8

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=float)
        if self.pixels.ndim != 2 or min(self.pixels.shape) < 1:
            raise ValueError(f"expected a non-empty 2-D array, got shape {self.pixels.shape}")
        if self.bit_depth not in (8, 16):
            raise ValueError(f"bit_depth must be 8 or 16, got {self.bit_depth}")
        if not np.all(np.isfinite(self.pixels)):
            raise ValueError("pixels must be finite")

    @property
    def rows(self) -> int:
        return self.pixels.shape[0]

    @property
    def cols(self) -> int:
        return self.pixels.shape[1]

    @property
    def peak(self) -> int:
        return 2 ** self.bit_depth - 1

    def clamped(self) -> "ImageBuffer":
        return ImageBuffer(np.clip(self.pixels, 0.0, self.peak), self.bit_depth)

    def with_pixels(self, pixels) -> "ImageBuffer":
        return ImageBuffer(pixels, self.bit_depth)
