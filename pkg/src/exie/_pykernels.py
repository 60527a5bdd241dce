"""Pure numpy implementation of the search kernels.

Used when the compiled extension is unavailable or when ``EXIE_PURE_PYTHON``
is set. Signatures mirror ``exie._ckernels`` exactly.
"""
from __future__ import annotations

import numpy as np

BACKEND = "python"

BRIGHTNESS, CONTRAST, GAMMA = 0, 1, 2
ALL_CHANNELS = -1


def apply_op(img, family, param, channel):
    out = img.copy()
    if channel == ALL_CHANNELS:
        src = img
        sel = (slice(None), slice(None), slice(None))
    else:
        src = img[:, :, channel]
        sel = (slice(None), slice(None), channel)

    if family == BRIGHTNESS:
        res = src + param
    elif family == CONTRAST:
        mu = src.mean(axis=(0, 1))
        res = mu + param * (src - mu)
    elif family == GAMMA:
        # exp(gamma * log x); log 0 = -inf gives 0
        with np.errstate(divide="ignore"):
            res = np.exp(param * np.log(src))
    else:
        raise ValueError(f"unknown operator family code {family}")
    np.clip(res, 0.0, 1.0, out=res)
    out[sel] = res
    return out


def distance(a, b):
    d = (a - b).ravel()
    return float(np.sqrt(np.dot(d, d)))


def _min_counters(x, target, params, eps_log, eps_eq):
    inv_step, log_c_up, log_c_down, log_g_up, log_g_down = params
    d = np.abs(x - target)
    equal = d <= eps_eq

    nb = d * inv_step

    mu = x.mean(axis=(0, 1))
    dx = x - mu
    dy = target - mu
    same_side = (dx * dy > 0) & (np.abs(dx) > eps_eq) & (np.abs(dy) > eps_eq)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(same_side, dy / np.where(same_side, dx, 1.0), 1.0)
        lr = np.log(ratio)
    nc = np.where(ratio > 1.0, lr / log_c_up, lr / log_c_down)
    nc = np.where(same_side, nc, np.inf)

    xc = np.clip(x, eps_log, 1.0 - eps_log)
    yc = np.clip(target, eps_log, 1.0 - eps_log)
    lg = np.log(np.log(yc) / np.log(xc))
    ng = np.where(xc >= yc, lg / log_g_up, lg / log_g_down)
    np.maximum(ng, 0.0, out=ng)

    m = np.minimum(np.minimum(nb, nc), ng)
    m[equal] = 0.0
    return m


def heuristic(x, target, params, eps_log, eps_eq):
    return float(_min_counters(x, target, params, eps_log, eps_eq).max())


def expand(x, target, families, ops_params, channels, hparams, eps_log, eps_eq):
    n = len(families)
    hs = np.empty(n)
    ds = np.empty(n)
    for k in range(n):
        child = apply_op(x, int(families[k]), float(ops_params[k]), int(channels[k]))
        hs[k] = heuristic(child, target, hparams, eps_log, eps_eq)
        ds[k] = distance(child, target)
    return hs, ds
