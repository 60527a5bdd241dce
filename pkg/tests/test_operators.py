import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from exie.operators import (Channels, EditSequence, Family, Operator, OperatorError,
                            SequenceVersionError, apply, apply_sequence, enumerate_all,
                            group_histogram, op_histogram, parse, serialize)
from exie.pipeline import is_clip_free

from conftest import interior_image

ALL_OPS = enumerate_all()
op_strategy = st.sampled_from(ALL_OPS)


def test_enumerate_counts():
    assert len(ALL_OPS) == 32
    assert len(set(ALL_OPS)) == 32
    assert sum(op.family is Family.BRIGHTNESS for op in ALL_OPS) == 16
    assert sum(op.family is Family.CONTRAST for op in ALL_OPS) == 8
    assert sum(op.family is Family.GAMMA for op in ALL_OPS) == 8
    assert ALL_OPS == sorted(ALL_OPS)
    assert ALL_OPS[0] == Operator(Family.BRIGHTNESS, -0.05, Channels.ALL)
    assert ALL_OPS[-1] == Operator(Family.GAMMA, 1.05, Channels.B)


@pytest.mark.parametrize("family,param", [(Family.BRIGHTNESS, 0.07), (Family.CONTRAST, 1.0),
                                          (Family.GAMMA, 0.5)])
def test_operator_rejects_foreign_params(family, param):
    with pytest.raises(OperatorError):
        Operator(family, param)


def test_brightness_clips():
    img = np.array([[[0.98, 0.2, 0.2]]])
    out = apply(Operator(Family.BRIGHTNESS, 0.05), img)
    assert out[0, 0].tolist() == pytest.approx([1.0, 0.25, 0.25], abs=1e-15)
    assert out[0, 0, 0] == 1.0


def test_contrast_single_channel():
    img = np.array([[[0.4, 0.3, 0.7]], [[0.6, 0.1, 0.2]]])
    out = apply(Operator(Family.CONTRAST, 1.4, Channels.R), img)
    assert out[:, 0, 0] == pytest.approx([0.36, 0.64], abs=1e-15)
    assert np.array_equal(out[:, :, 1:], img[:, :, 1:])


def test_gamma_all():
    out = apply(Operator(Family.GAMMA, 0.6), np.full((1, 1, 3), 0.25))
    assert out[0, 0] == pytest.approx([0.25 ** 0.6] * 3, rel=1e-14)
    assert out[0, 0, 0] == pytest.approx(0.43528, abs=1e-5)


def test_gamma_of_zero_is_zero():
    out = apply(Operator(Family.GAMMA, 0.6), np.zeros((2, 2, 3)))
    assert np.array_equal(out, np.zeros((2, 2, 3)))


def test_apply_does_not_mutate(rng):
    img = rng.uniform(0, 1, (4, 4, 3))
    before = img.copy()
    for op in ALL_OPS:
        apply(op, img)
    assert np.array_equal(img, before)


def test_apply_sequence_identity(rng):
    img = rng.uniform(0, 1, (4, 4, 3))
    assert np.array_equal(apply_sequence(EditSequence(), img), img)


def test_inverse_brightness_pair(rng):
    img = interior_image(rng)
    seq = [Operator(Family.BRIGHTNESS, 0.05), Operator(Family.BRIGHTNESS, -0.05)]
    assert np.allclose(apply_sequence(seq, img), img, atol=1e-15, rtol=0)


@settings(max_examples=50, deadline=None)
@given(st.lists(op_strategy, min_size=3, max_size=3), st.integers(0, 2**32 - 1))
def test_sequence_is_composition(ops, seed):
    img = np.random.default_rng(seed).uniform(0, 1, (5, 4, 3))
    manual = apply(ops[2], apply(ops[1], apply(ops[0], img)))
    assert np.array_equal(apply_sequence(ops, img), manual)


@settings(max_examples=200, deadline=None)
@given(op_strategy, st.integers(0, 2**32 - 1))
def test_apply_range_and_untouched_channels(op, seed):
    r = np.random.default_rng(seed)
    img = r.uniform(0, 1, (6, 5, 3))
    img[0, 0] = 0.0
    img[0, 1] = 1.0
    out = apply(op, img)
    assert out.min() >= 0.0 and out.max() <= 1.0
    if op.channels is not Channels.ALL:
        others = [c for c in range(3) if c != op.channels.index]
        assert np.array_equal(out[:, :, others], img[:, :, others])


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([op for op in ALL_OPS if op.family is Family.CONTRAST]),
       st.integers(0, 2**32 - 1))
def test_contrast_preserves_mean_without_clipping(op, seed):
    img = np.random.default_rng(seed).uniform(0.35, 0.65, (7, 7, 3))
    assert is_clip_free(op, img)
    out = apply(op, img)
    assert np.allclose(out.mean(axis=(0, 1)), img.mean(axis=(0, 1)), atol=1e-12, rtol=0)


@settings(max_examples=100, deadline=None)
@given(op_strategy, st.integers(0, 2**32 - 1))
def test_order_preserved_without_clipping(op, seed):
    img = np.random.default_rng(seed).uniform(0.3, 0.7, (16, 1, 3))
    out = apply(op, img)
    for c in range(3):
        assert np.array_equal(np.argsort(out[:, 0, c], kind="stable"),
                              np.argsort(img[:, 0, c], kind="stable"))


def test_apply_deterministic(rng):
    img = rng.uniform(0, 1, (9, 9, 3))
    for op in ALL_OPS:
        assert np.array_equal(apply(op, img), apply(op, img))


# serialization

@settings(max_examples=50, deadline=None)
@given(st.lists(op_strategy, max_size=12))
def test_serialize_roundtrip(ops):
    seq = EditSequence(ops, {"source": "a.png", "n": len(ops)})
    assert parse(serialize(seq)) == seq


def test_serialized_format():
    seq = EditSequence([Operator(Family.BRIGHTNESS, 0.05), Operator(Family.GAMMA, 0.6, Channels.R)])
    doc = json.loads(serialize(seq))
    assert doc["version"] == 1
    assert doc["operators"] == [
        {"family": "brightness", "param": 0.05, "channels": "all"},
        {"family": "gamma", "param": 0.6, "channels": "r"},
    ]


def _doc(**kw):
    doc = {"version": 1, "operators": [{"family": "brightness", "param": 0.05, "channels": "all"}]}
    doc.update(kw)
    return json.dumps(doc)


@pytest.mark.parametrize("ops", [
    [{"family": "brightness", "param": 0.07, "channels": "all"}],
    [{"family": "saturation", "param": 0.05, "channels": "all"}],
    [{"family": "gamma", "param": 0.6, "channels": "alpha"}],
    [{"family": "gamma", "param": "0.6", "channels": "r"}],
    ["brightness"],
])
def test_parse_rejects_bad_operators(ops):
    with pytest.raises(OperatorError):
        parse(_doc(operators=ops))


def test_parse_version_errors():
    with pytest.raises(SequenceVersionError):
        parse(_doc(version=99))
    with pytest.raises(SequenceVersionError):
        parse(json.dumps({"operators": []}))


def test_parse_rejects_non_json():
    with pytest.raises(OperatorError):
        parse(b"\xff\xfe{")
    with pytest.raises(OperatorError):
        parse("[1, 2")


# histograms

def test_histogram_examples():
    assert op_histogram([]) == {}
    b = Operator(Family.BRIGHTNESS, 0.05)
    g = Operator(Family.GAMMA, 0.6, Channels.R)
    assert op_histogram([b, b, g]) == {b: 2, g: 1}
    assert group_histogram([b, b, g]) == {(Family.BRIGHTNESS, Channels.ALL): 2,
                                          (Family.GAMMA, Channels.R): 1}


@given(st.lists(op_strategy, max_size=30))
def test_histogram_conserves_length(ops):
    assert sum(op_histogram(ops).values()) == len(ops)
    assert sum(group_histogram(ops).values()) == len(ops)
