"""Backend selection for the hot search kernels.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
numpy fallback in ``_pykernels`` is used. Set ``EXIE_PURE_PYTHON=1`` to force
the fallback.
"""
from __future__ import annotations

import logging
import os

from . import _pykernels

log = logging.getLogger(__name__)


def _select():
    if os.environ.get("EXIE_PURE_PYTHON", "").strip() not in ("", "0"):
        return _pykernels
    try:
        from . import _ckernels
    except ImportError:  # extension not built
        log.debug("compiled kernels unavailable, using numpy fallback")
        return _pykernels
    return _ckernels


_impl = _select()

BACKEND = _impl.BACKEND
BRIGHTNESS = _impl.BRIGHTNESS
CONTRAST = _impl.CONTRAST
GAMMA = _impl.GAMMA
ALL_CHANNELS = _impl.ALL_CHANNELS

apply_op = _impl.apply_op
distance = _impl.distance
heuristic = _impl.heuristic
expand = _impl.expand


def available_backends():
    """Names of kernel modules importable in this environment."""
    names = {"python": _pykernels}
    try:
        from . import _ckernels
        names["cython"] = _ckernels
    except ImportError:
        pass
    return names
