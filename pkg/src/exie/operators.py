"""The 32 global editing operators and operator sequences.

Three families act on every pixel of the selected channel(s), with the
result clipped to [0, 1]:

* brightness  x -> x + delta
* contrast    x -> mu + sigma * (x - mu), mu = channel mean of the input
* gamma       x -> x ** gamma
"""
from __future__ import annotations

import enum
import functools
import json
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import kernels

FORMAT_VERSION = 1

BRIGHTNESS_STEPS = (-0.05, 0.05, -0.005, 0.005)
CONTRAST_FACTORS = (0.9, 1.4)
GAMMA_EXPONENTS = (0.6, 1.05)


class Family(enum.Enum):
    BRIGHTNESS = "brightness"
    CONTRAST = "contrast"
    GAMMA = "gamma"

    @property
    def code(self) -> int:
        return _FAMILY_CODES[self]

    @property
    def params(self) -> tuple[float, ...]:
        return _FAMILY_PARAMS[self]


class Channels(enum.Enum):
    ALL = "all"
    R = "r"
    G = "g"
    B = "b"

    @property
    def index(self) -> int:
        """Channel index, or -1 for all channels."""
        return _CHANNEL_INDEX[self]


_FAMILY_CODES = {
    Family.BRIGHTNESS: kernels.BRIGHTNESS,
    Family.CONTRAST: kernels.CONTRAST,
    Family.GAMMA: kernels.GAMMA,
}
_FAMILY_PARAMS = {
    Family.BRIGHTNESS: BRIGHTNESS_STEPS,
    Family.CONTRAST: CONTRAST_FACTORS,
    Family.GAMMA: GAMMA_EXPONENTS,
}
_CHANNEL_INDEX = {Channels.ALL: kernels.ALL_CHANNELS, Channels.R: 0, Channels.G: 1, Channels.B: 2}
_SHORT = {Family.BRIGHTNESS: "B", Family.CONTRAST: "C", Family.GAMMA: "G"}


class OperatorError(ValueError):
    """An operator or sequence document failed validation."""


class SequenceVersionError(OperatorError):
    """Sequence document has a missing or unsupported version."""


@functools.total_ordering
@dataclass(frozen=True)
class Operator:
    family: Family
    param: float
    channels: Channels = Channels.ALL

    def __post_init__(self):
        if not isinstance(self.family, Family):
            raise OperatorError(f"unknown family {self.family!r}")
        if not isinstance(self.channels, Channels):
            raise OperatorError(f"unknown channel selector {self.channels!r}")
        if self.param not in self.family.params:
            raise OperatorError(
                f"{self.family.value} parameter {self.param!r} not in {self.family.params}"
            )

    def __lt__(self, other):
        return _sort_key(self) < _sort_key(other)

    def __str__(self):
        return f"{_SHORT[self.family]}({self.param:+g},{self.channels.value.upper()})"

    def __call__(self, img: np.ndarray) -> np.ndarray:
        return apply(self, img)

    def to_dict(self) -> dict:
        return {"family": self.family.value, "param": self.param, "channels": self.channels.value}

    @classmethod
    def from_dict(cls, d: dict) -> "Operator":
        try:
            family = Family(d["family"])
        except (KeyError, ValueError):
            raise OperatorError(f"unknown operator family {d.get('family')!r}") from None
        try:
            channels = Channels(d.get("channels", "all"))
        except ValueError:
            raise OperatorError(f"unknown channel selector {d.get('channels')!r}") from None
        param = d.get("param")
        if isinstance(param, bool) or not isinstance(param, (int, float)):
            raise OperatorError(f"operator parameter must be a number, got {param!r}")
        return cls(family, float(param), channels)


def _sort_key(op: Operator):
    return (
        list(Family).index(op.family),
        op.family.params.index(op.param),
        list(Channels).index(op.channels),
    )


def enumerate_all() -> list[Operator]:
    """All 32 operators, family-major, then parameter, then channel selector."""
    return [
        Operator(family, p, ch)
        for family in Family
        for p in family.params
        for ch in Channels
    ]


def apply(op: Operator, img: np.ndarray) -> np.ndarray:
    return kernels.apply_op(img, op.family.code, op.param, op.channels.index)


@dataclass
class EditSequence:
    ops: list[Operator] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def __str__(self):
        return " -> ".join(str(op) for op in self.ops) or "<identity>"


def apply_sequence(seq, img: np.ndarray) -> np.ndarray:
    """Apply operators left to right; an empty sequence returns a copy of ``img``."""
    out = np.array(img, dtype=np.float64, order="C")
    for op in seq:
        out = apply(op, out)
    return out


def serialize(seq: EditSequence) -> bytes:
    doc = {
        "version": FORMAT_VERSION,
        "operators": [op.to_dict() for op in seq.ops],
        "meta": seq.meta,
    }
    return (json.dumps(doc, indent=2, sort_keys=False) + "\n").encode("utf-8")


def parse(data: bytes | str) -> EditSequence:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise OperatorError(f"sequence document is not UTF-8: {exc}") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise OperatorError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise OperatorError("sequence document must be a JSON object")
    if "version" not in doc:
        raise SequenceVersionError("sequence document has no version")
    if doc["version"] != FORMAT_VERSION:
        raise SequenceVersionError(f"unsupported sequence version {doc['version']!r}")
    raw_ops = doc.get("operators")
    if not isinstance(raw_ops, list):
        raise OperatorError("'operators' must be a list")
    ops = []
    for i, item in enumerate(raw_ops):
        if not isinstance(item, dict):
            raise OperatorError(f"operator {i} is not an object")
        try:
            ops.append(Operator.from_dict(item))
        except OperatorError as exc:
            raise OperatorError(f"operator {i}: {exc}") from None
    meta = doc.get("meta", {})
    if not isinstance(meta, dict):
        raise OperatorError("'meta' must be an object")
    return EditSequence(ops, meta)


def op_histogram(seq) -> dict[Operator, int]:
    """Count occurrences of each concrete operator."""
    return dict(Counter(seq))


def group_histogram(seq) -> dict[tuple[Family, Channels], int]:
    """Counts aggregated over parameters, keyed by (family, channel selector)."""
    return dict(Counter((op.family, op.channels) for op in seq))
