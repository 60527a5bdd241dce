import numpy as np
import pytest

from exie.image import DimensionMismatchError, distance, resize_box
from exie.operators import Channels, Family, Operator, apply_sequence
from exie.pipeline import is_clip_free, synthesize, trace
from exie.search import SearchConfig


def test_synth_deterministic_and_consistent():
    a, b = synthesize(7, 3), synthesize(7, 3)
    assert np.array_equal(a.input, b.input) and np.array_equal(a.target, b.target)
    assert a.truth == b.truth
    assert len(a.truth) == 3
    assert all(op.channels is Channels.ALL for op in a.truth)
    assert a.input.min() >= 0.1 and a.input.max() <= 0.9
    assert np.array_equal(np.round(a.input * 255), a.input * 255)
    replay = apply_sequence(a.truth, a.input)
    assert np.max(np.abs(replay - a.target)) <= 1 / 510 + 1e-12
    assert distance(a.input, a.target) >= 1.0


def test_synth_sequences_are_clip_free():
    for seed in range(20):
        p = synthesize(seed, 5)
        img = p.input
        for op in p.truth:
            assert is_clip_free(op, img)
            img = op(img)


def test_synth_rejects_zero_length():
    with pytest.raises(ValueError):
        synthesize(0, 0)


def test_is_clip_free():
    img = np.full((2, 2, 3), 0.97)
    assert not is_clip_free(Operator(Family.BRIGHTNESS, 0.05), img)
    assert is_clip_free(Operator(Family.BRIGHTNESS, 0.005), img)
    assert is_clip_free(Operator(Family.GAMMA, 0.6), img)
    img2 = np.array([[[0.1, 0.5, 0.5]], [[0.9, 0.5, 0.5]]])
    assert not is_clip_free(Operator(Family.CONTRAST, 1.4, Channels.R), img2)
    assert is_clip_free(Operator(Family.CONTRAST, 1.4, Channels.G), img2)


def test_trace_lowres_replays_at_full_resolution(rng):
    x = rng.uniform(0.2, 0.7, (64, 48, 3))
    truth = [Operator(Family.BRIGHTNESS, 0.05)] * 2
    y = apply_sequence(truth, x)
    res = trace(x, y, SearchConfig(tau=0.01), search_res=16)
    assert res.search_input.shape == (16, 16, 3)
    assert res.replay.shape == x.shape
    assert np.allclose(resize_box(res.replay, 16, 16), res.report.result, atol=1e-12)


def test_trace_native_requires_same_shape():
    with pytest.raises(DimensionMismatchError):
        trace(np.zeros((8, 8, 3)), np.zeros((8, 9, 3)))
