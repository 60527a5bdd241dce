"""Full-reference quality metrics: PSNR, SSIM and mean CIE76 colour difference."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .image import check_same_shape

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03

# linear sRGB -> XYZ, D65 (IEC 61966-2-1)
SRGB_TO_XYZ = np.array([
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
])
# reference white as the image of RGB (1, 1, 1), so neutral greys map to a* = b* = 0
WHITE_XYZ = SRGB_TO_XYZ.sum(axis=1)


@dataclass(frozen=True)
class MetricsReport:
    psnr: float
    ssim: float
    delta_e: float

    def to_dict(self) -> dict:
        return {
            "psnr": "inf" if math.isinf(self.psnr) else self.psnr,
            "ssim": self.ssim,
            "delta_e": self.delta_e,
        }


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB with peak 1.0; ``inf`` for identical images."""
    check_same_shape(a, b)
    mse = float(np.mean((np.asarray(a, dtype=np.float64) - b) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def _gaussian_window(size=SSIM_WINDOW, sigma=SSIM_SIGMA):
    r = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(r ** 2) / (2.0 * sigma ** 2))
    return g / g.sum()


def _filter_valid(img2d, g):
    # separable Gaussian, keeping only positions where the window fits
    rows = sliding_window_view(img2d, len(g), axis=0) @ g
    return sliding_window_view(rows, len(g), axis=1) @ g


def ssim(a: np.ndarray, b: np.ndarray, data_range: float = 1.0) -> float:
    """Mean single-scale SSIM over the three colour channels."""
    check_same_shape(a, b)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if min(a.shape[0], a.shape[1]) < SSIM_WINDOW:
        raise ValueError(
            f"SSIM needs images of at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {a.shape[:2]}"
        )
    c1 = (SSIM_K1 * data_range) ** 2
    c2 = (SSIM_K2 * data_range) ** 2
    g = _gaussian_window()
    scores = []
    for c in range(a.shape[2]):
        x, y = a[:, :, c], b[:, :, c]
        mx = _filter_valid(x, g)
        my = _filter_valid(y, g)
        vx = _filter_valid(x * x, g) - mx * mx
        vy = _filter_valid(y * y, g) - my * my
        cxy = _filter_valid(x * y, g) - mx * my
        s = ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2))
        scores.append(s.mean())
    return float(np.mean(scores))


def srgb_to_linear(v):
    v = np.asarray(v, dtype=np.float64)
    return np.where(v <= 0.04045, v / 12.92, ((v + 0.055) / 1.055) ** 2.4)


def srgb_to_lab(img):
    """Convert sRGB values in [0, 1] (last axis = RGB) to CIELAB, D65."""
    xyz = srgb_to_linear(img) @ SRGB_TO_XYZ.T
    t = xyz / WHITE_XYZ
    eps = (6.0 / 29.0) ** 3
    f = np.where(t > eps, np.cbrt(t), t / (3 * (6.0 / 29.0) ** 2) + 4.0 / 29.0)
    L = 116.0 * f[..., 1] - 16.0
    A = 500.0 * (f[..., 0] - f[..., 1])
    B = 200.0 * (f[..., 1] - f[..., 2])
    return np.stack([L, A, B], axis=-1)


def delta_e(a: np.ndarray, b: np.ndarray) -> float:
    """Mean per-pixel CIE76 colour difference."""
    check_same_shape(a, b)
    d = srgb_to_lab(a) - srgb_to_lab(b)
    return float(np.mean(np.sqrt(np.sum(d * d, axis=-1))))


def compute_all(a: np.ndarray, b: np.ndarray) -> MetricsReport:
    return MetricsReport(psnr(a, b), ssim(a, b), delta_e(a, b))
