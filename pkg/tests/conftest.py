import numpy as np
import pytest

from exie import kernels


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def interior_image(rng, h=8, w=8, lo=0.1, hi=0.9):
    return rng.uniform(lo, hi, size=(h, w, 3))


@pytest.fixture(params=sorted(kernels.available_backends()))
def backend(request):
    """Each importable kernel module in turn."""
    return kernels.available_backends()[request.param]
