"""Higher-level workflows: low-resolution trace with full-resolution replay,
and synthetic (input, target, ground truth) generation."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .image import check_same_shape, distance, resize_box, to_uint8
from .operators import Channels, EditSequence, Family, Operator, apply, apply_sequence, enumerate_all
from .search import SearchConfig, SearchReport, exie_search

SYNTH_SIZE = 32
SYNTH_LOW, SYNTH_HIGH = 0.1, 0.9


@dataclass
class TraceResult:
    report: SearchReport
    replay: np.ndarray  # sequence applied to the full-resolution input
    search_input: np.ndarray
    search_target: np.ndarray


def trace(x: np.ndarray, target: np.ndarray, cfg: SearchConfig | None = None,
          search_res: int | None = None) -> TraceResult:
    """Search on (optionally downsampled) copies, then replay on the original ``x``.

    With ``search_res`` both images are independently box-resized to a square
    ``search_res`` x ``search_res`` (aspect ratio is not preserved).
    """
    cfg = cfg or SearchConfig()
    if search_res is None:
        check_same_shape(x, target)
        xs, ys = x, target
    else:
        xs = resize_box(x, search_res, search_res)
        ys = resize_box(target, search_res, search_res)
    report = exie_search(xs, ys, cfg)
    replay = report.result if search_res is None else apply_sequence(report.sequence, x)
    return TraceResult(report, replay, xs, ys)


def is_clip_free(op: Operator, img: np.ndarray) -> bool:
    """True if applying ``op`` to ``img`` never needs clipping."""
    sel = img if op.channels is Channels.ALL else img[:, :, op.channels.index]
    if op.family is Family.BRIGHTNESS:
        return sel.min() + op.param >= 0.0 and sel.max() + op.param <= 1.0
    if op.family is Family.CONTRAST:
        mu = sel.mean(axis=(0, 1))
        lo = mu + op.param * (sel.min(axis=(0, 1)) - mu)
        hi = mu + op.param * (sel.max(axis=(0, 1)) - mu)
        return bool(np.all(lo >= 0.0) and np.all(hi <= 1.0))
    # powers of values in [0, 1] stay in [0, 1]
    return True


@dataclass
class SynthPair:
    input: np.ndarray
    target: np.ndarray
    truth: EditSequence


def synthesize(seed: int, length: int, size: int = SYNTH_SIZE, min_distance: float = 1.0,
               families: tuple[Family, ...] | None = None, max_tries: int = 1000) -> SynthPair:
    """Random interior-valued input plus a planted clip-free operator sequence.

    The input holds 8-bit levels in [0.1, 0.9] so it survives a PNG round
    trip exactly; the target is the planted replay quantized to 8 bits.
    Draws whose target lies within ``min_distance`` of the input are
    rejected so that the plant is not trivially absorbed by a goal
    threshold.
    """
    if length < 1:
        raise ValueError(f"planted length must be >= 1, got {length}")
    rng = np.random.default_rng(seed)
    lo, hi = math.ceil(SYNTH_LOW * 255), math.floor(SYNTH_HIGH * 255)
    x = rng.integers(lo, hi + 1, size=(size, size, 3)).astype(np.float64) / 255.0
    pool = [op for op in enumerate_all()
            if op.channels is Channels.ALL and (families is None or op.family in families)]
    for _ in range(max_tries):
        img = x
        ops = []
        while len(ops) < length:
            op = pool[rng.integers(len(pool))]
            if is_clip_free(op, img):
                ops.append(op)
                img = apply(op, img)
        target = to_uint8(img) / 255.0
        if distance(x, target) >= min_distance:
            return SynthPair(x, target, EditSequence(ops, {"seed": seed, "length": length}))
    raise RuntimeError(f"no planted sequence with distance >= {min_distance} after {max_tries} draws")
