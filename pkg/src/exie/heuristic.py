"""Per-pixel step counters and the image-level search heuristic.

For each pixel value the counters estimate how many applications of one
operator family move the value onto its target. The heuristic of an image
is the largest, over all pixel values, of the smallest counter.

Deviations from the textbook formulas, all for numerical safety:

* the contrast divisor is chosen by whether the distance to the mean must
  grow (log 1.4) or shrink (log 0.9), so the counter is never negative;
* gamma logarithms clamp their inputs to [eps_log, 1 - eps_log];
* values within ``eps_eq`` of their target contribute 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .image import check_same_shape
from .operators import BRIGHTNESS_STEPS, CONTRAST_FACTORS, GAMMA_EXPONENTS

INF = math.inf

_STEP = max(abs(d) for d in BRIGHTNESS_STEPS)
_LOG_C_UP = math.log(max(CONTRAST_FACTORS))
_LOG_C_DOWN = math.log(min(CONTRAST_FACTORS))
_LOG_G_UP = math.log(max(GAMMA_EXPONENTS))
_LOG_G_DOWN = math.log(min(GAMMA_EXPONENTS))

# packed for the kernels: (1/step, log sigma_up, log sigma_down, log gamma_up, log gamma_down)
KERNEL_PARAMS = np.array([1.0 / _STEP, _LOG_C_UP, _LOG_C_DOWN, _LOG_G_UP, _LOG_G_DOWN])


@dataclass(frozen=True)
class HeuristicConfig:
    eps_log: float = 1e-4
    eps_eq: float = 1e-9

    def __post_init__(self):
        if not 0.0 < self.eps_log < 0.5:
            raise ValueError(f"eps_log must lie in (0, 0.5), got {self.eps_log}")
        if self.eps_eq < 0.0:
            raise ValueError(f"eps_eq must be nonnegative, got {self.eps_eq}")


DEFAULT_CONFIG = HeuristicConfig()


def brightness_counter(x: float, y: float, cfg: HeuristicConfig = DEFAULT_CONFIG) -> float:
    d = abs(x - y)
    if d <= cfg.eps_eq:
        return 0.0
    return min(d / abs(step) for step in BRIGHTNESS_STEPS)


def contrast_counter(x: float, y: float, mu: float, cfg: HeuristicConfig = DEFAULT_CONFIG) -> float:
    if abs(x - y) <= cfg.eps_eq:
        return 0.0
    dx, dy = x - mu, y - mu
    if abs(dx) <= cfg.eps_eq or abs(dy) <= cfg.eps_eq or dx * dy < 0:
        # contrast cannot move a value across (or off) the mean
        return INF
    ratio = dy / dx
    return math.log(ratio) / (_LOG_C_UP if ratio > 1.0 else _LOG_C_DOWN)


def gamma_counter(x: float, y: float, cfg: HeuristicConfig = DEFAULT_CONFIG) -> float:
    if abs(x - y) <= cfg.eps_eq:
        return 0.0
    lo, hi = cfg.eps_log, 1.0 - cfg.eps_log
    xc = min(hi, max(lo, x))
    yc = min(hi, max(lo, y))
    lg = math.log(math.log(yc) / math.log(xc))
    n = lg / (_LOG_G_UP if xc >= yc else _LOG_G_DOWN)
    return max(n, 0.0)


def heuristic_h(x: np.ndarray, target: np.ndarray, cfg: HeuristicConfig = DEFAULT_CONFIG) -> float:
    """max over (i, j, c) of min(N_B, N_C, N_G), with mu taken from ``x``.

    Always finite: the brightness counter is bounded by 1 / 0.05 = 20.
    """
    check_same_shape(x, target)
    return kernels.heuristic(x, target, KERNEL_PARAMS, cfg.eps_log, cfg.eps_eq)


def counters(x: np.ndarray, target: np.ndarray, cfg: HeuristicConfig = DEFAULT_CONFIG):
    """Per-entry (N_B, N_C, N_G) arrays, evaluated one scalar at a time.

    Slow; meant for inspection and for checking the vectorized kernels.
    """
    check_same_shape(x, target)
    x = np.asarray(x, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    mu = x.mean(axis=(0, 1))
    nb = np.empty_like(x)
    nc = np.empty_like(x)
    ng = np.empty_like(x)
    for idx in np.ndindex(x.shape):
        xv, yv = float(x[idx]), float(target[idx])
        nb[idx] = brightness_counter(xv, yv, cfg)
        nc[idx] = contrast_counter(xv, yv, float(mu[idx[2]]), cfg)
        ng[idx] = gamma_counter(xv, yv, cfg)
    return nb, nc, ng
