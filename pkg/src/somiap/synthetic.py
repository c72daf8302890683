"""Deterministic synthetic images for tests, demos and benchmarks."""

from __future__ import annotations

import numpy as np


def scene(seed: int, width: int = 256, height: int = 256, shapes: int = 60) -> np.ndarray:
    """A color scene of random filled rectangles and discs on a gradient."""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:height, 0:width]
    base = rng.uniform(40, 200, size=3)
    slope = rng.uniform(-0.3, 0.3, size=(3, 2))
    img = np.empty((height, width, 3), dtype=np.float64)
    for c in range(3):
        img[..., c] = base[c] + slope[c, 0] * xx + slope[c, 1] * yy
    for _ in range(shapes):
        color = rng.uniform(0, 255, size=3)
        cx, cy = rng.uniform(0, width), rng.uniform(0, height)
        size = rng.uniform(6, max(8.0, min(width, height) / 5))
        if rng.random() < 0.5:
            m = (np.abs(xx - cx) < size) & (np.abs(yy - cy) < size * rng.uniform(0.4, 1.0))
        else:
            m = (xx - cx) ** 2 + (yy - cy) ** 2 < size**2
        img[m] = color
    return np.clip(np.rint(img), 0, 255).astype(np.uint8)


def add_noise(img: np.ndarray, sigma: float, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    noisy = img.astype(np.float64) + rng.normal(0, sigma, size=img.shape)
    return np.clip(np.rint(noisy), 0, 255).astype(np.uint8)


def texture(seed: int, size: int = 64, period: int = 8) -> np.ndarray:
    """Periodic gray texture: a random ``period``-sized tile repeated over the image."""
    rng = np.random.default_rng(seed)
    tile = rng.integers(0, 256, size=(period, period))
    reps = -(-size // period)
    return np.tile(tile, (reps, reps))[:size, :size].astype(np.uint8)


def paste(background: np.ndarray, patch: np.ndarray, x: int, y: int) -> np.ndarray:
    out = background.copy()
    h, w = patch.shape[:2]
    out[y : y + h, x : x + w] = patch
    return out
