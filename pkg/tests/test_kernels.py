import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from exie import _pykernels, kernels
from exie.heuristic import KERNEL_PARAMS
from exie.operators import enumerate_all

OPS = enumerate_all()
FAM = np.array([op.family.code for op in OPS], dtype=np.int32)
PAR = np.array([op.param for op in OPS])
CHAN = np.array([op.channels.index for op in OPS], dtype=np.int32)


def _pair(seed, shape=(9, 7, 3)):
    r = np.random.default_rng(seed)
    x = r.uniform(0, 1, shape)
    y = r.uniform(0, 1, shape)
    x[0, 0] = 0.0
    x[0, 1] = 1.0
    y[1, 0] = x[1, 0]
    return x, y


def test_expand_matches_separate_calls(backend):
    x, y = _pair(1)
    hs, ds = backend.expand(x, y, FAM, PAR, CHAN, KERNEL_PARAMS, 1e-4, 1e-9)
    for k in range(len(OPS)):
        child = backend.apply_op(x, int(FAM[k]), float(PAR[k]), int(CHAN[k]))
        assert hs[k] == backend.heuristic(child, y, KERNEL_PARAMS, 1e-4, 1e-9)
        assert ds[k] == backend.distance(child, y)


def test_unknown_family_rejected(backend):
    with pytest.raises(ValueError):
        backend.apply_op(np.zeros((1, 1, 3)), 7, 1.0, -1)


@pytest.mark.skipif("cython" not in kernels.available_backends(), reason="extension not built")
@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_backends_agree(seed):
    c = kernels.available_backends()["cython"]
    p = _pykernels
    x, y = _pair(seed)
    for k in range(len(OPS)):
        a = c.apply_op(x, int(FAM[k]), float(PAR[k]), int(CHAN[k]))
        b = p.apply_op(x, int(FAM[k]), float(PAR[k]), int(CHAN[k]))
        assert np.allclose(a, b, rtol=0, atol=1e-14)
    assert c.heuristic(x, y, KERNEL_PARAMS, 1e-4, 1e-9) == pytest.approx(
        p.heuristic(x, y, KERNEL_PARAMS, 1e-4, 1e-9), rel=1e-12)
    hc, dc = c.expand(x, y, FAM, PAR, CHAN, KERNEL_PARAMS, 1e-4, 1e-9)
    hp, dp = p.expand(x, y, FAM, PAR, CHAN, KERNEL_PARAMS, 1e-4, 1e-9)
    assert np.allclose(hc, hp, rtol=1e-12, atol=1e-12)
    assert np.allclose(dc, dp, rtol=1e-12, atol=0)


def test_env_var_forces_fallback():
    code = "from exie import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, EXIE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True)
    assert out.stdout.strip() == "python"


def test_search_same_result_on_both_backends():
    code = (
        "import json; from exie.pipeline import synthesize; "
        "from exie.search import exie_search, SearchConfig; "
        "p = synthesize(4, 3); r = exie_search(p.input, p.target, SearchConfig(tau=0.5)); "
        "print(json.dumps([str(r.sequence), r.terminated_by.value]))"
    )
    outs = set()
    for flag in ("0", "1"):
        env = dict(os.environ, EXIE_PURE_PYTHON=flag)
        outs.add(subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                                text=True, check=True).stdout)
    assert len(outs) == 1
