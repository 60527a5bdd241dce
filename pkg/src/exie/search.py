"""Best-first (A*-style) search for an operator sequence mapping x onto a target.

Nodes are ordered by f = g + h, where g is the number of operators applied
so far and h is :func:`exie.heuristic.heuristic_h`. A popped node closer
than ``tau`` to the target ends the search; once ``max_nodes`` nodes have
been expanded, the generated node nearest to the target is returned.

Open nodes keep only their operator path, not their pixels: an image is
rebuilt from the root (or from a cached ancestor) when the node is popped.
"""
from __future__ import annotations

import enum
import hashlib
import heapq
import itertools
import logging
import time
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .heuristic import DEFAULT_CONFIG as DEFAULT_HEURISTIC, KERNEL_PARAMS, HeuristicConfig
from .image import check_same_shape, distance, to_uint8
from .operators import EditSequence, Operator, apply, enumerate_all

log = logging.getLogger(__name__)

DEFAULT_TAU = 2.0
DEFAULT_MAX_NODES = 7000


class TieBreak(enum.Enum):
    LIFO = "lifo"
    FIFO = "fifo"


class Dedup(enum.Enum):
    NONE = "none"
    HASH = "hash"


class Termination(enum.Enum):
    THRESHOLD = "threshold"
    BUDGET = "budget"
    # open set ran dry, only possible with duplicate pruning
    EXHAUSTED = "exhausted"


@dataclass
class SearchConfig:
    tau: float = DEFAULT_TAU
    max_nodes: int = DEFAULT_MAX_NODES
    operators: list[Operator] = field(default_factory=enumerate_all)
    tie_break: TieBreak = TieBreak.LIFO
    dedup: Dedup = Dedup.NONE
    heuristic: HeuristicConfig = DEFAULT_HEURISTIC
    normalized_distance: bool = False

    def __post_init__(self):
        self.tie_break = TieBreak(self.tie_break)
        self.dedup = Dedup(self.dedup)
        if not self.tau >= 0:
            raise ValueError(f"tau must be nonnegative, got {self.tau}")
        if int(self.max_nodes) != self.max_nodes or self.max_nodes < 1:
            raise ValueError(f"max_nodes must be a positive integer, got {self.max_nodes}")
        self.max_nodes = int(self.max_nodes)
        if not self.operators:
            raise ValueError("operator set is empty")
        self.operators = list(self.operators)

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "max_nodes": self.max_nodes,
            "n_operators": len(self.operators),
            "tie_break": self.tie_break.value,
            "dedup": self.dedup.value,
            "eps_log": self.heuristic.eps_log,
            "eps_eq": self.heuristic.eps_eq,
            "normalized_distance": self.normalized_distance,
        }


class SearchNode:
    """Operator path from the root with cached g, h, f and distance to target."""

    __slots__ = ("path", "g", "h", "f", "dist")

    def __init__(self, path: tuple[int, ...], g: int, h: float, dist: float):
        self.path = path
        self.g = g
        self.h = h
        self.f = g + h
        self.dist = dist

    def __repr__(self):
        return f"SearchNode(path={self.path}, g={self.g}, h={self.h:.4g}, dist={self.dist:.4g})"


@dataclass
class SearchReport:
    sequence: EditSequence
    result_distance: float
    input_distance: float
    expanded: int
    generated: int
    terminated_by: Termination
    wall_time: float
    result: np.ndarray = field(repr=False)
    # (expansions so far, best distance) each time the best node improves
    history: list[tuple[int, float]] = field(default_factory=list, repr=False)

    def summary(self) -> dict:
        return {
            "length": len(self.sequence),
            "input_distance": self.input_distance,
            "result_distance": self.result_distance,
            "expanded": self.expanded,
            "generated": self.generated,
            "terminated_by": self.terminated_by.value,
            "wall_time": round(self.wall_time, 6),
        }


class OpenSet:
    """Binary heap of nodes keyed on f, with deterministic tie-breaking.

    LIFO pops the most recently pushed node among equal f values, FIFO the
    oldest.
    """

    def __init__(self, tie_break: TieBreak = TieBreak.LIFO):
        self._heap: list = []
        self._counter = itertools.count()
        self._sign = -1 if TieBreak(tie_break) is TieBreak.LIFO else 1

    def push(self, node: SearchNode) -> None:
        heapq.heappush(self._heap, (node.f, self._sign * next(self._counter), node))

    def pop_best(self) -> SearchNode:
        if not self._heap:
            raise IndexError("pop from empty open set")
        return heapq.heappop(self._heap)[2]

    def __len__(self):
        return len(self._heap)

    def __bool__(self):
        return bool(self._heap)


def materialize(path, root: np.ndarray, operators: list[Operator]) -> np.ndarray:
    """Replay the operator ids in ``path`` on ``root``."""
    img = np.array(root, dtype=np.float64, order="C")
    for k in path:
        if not 0 <= k < len(operators):
            raise IndexError(f"operator id {k} out of range")
        img = apply(operators[k], img)
    return img


class _ImageCache:
    """Small LRU of expanded node images so children replay one step."""

    def __init__(self, root, operators, max_bytes=64 << 20):
        self.root = root
        self.operators = operators
        self.size = max(16, max_bytes // root.nbytes)
        self._cache: OrderedDict = OrderedDict()

    def get(self, path):
        if not path:
            return self.root
        img = self._cache.get(path)
        if img is not None:
            self._cache.move_to_end(path)
            return img
        parent = self._cache.get(path[:-1])
        if parent is not None:
            img = apply(self.operators[path[-1]], parent)
        else:
            img = materialize(path, self.root, self.operators)
        return img

    def put(self, path, img):
        self._cache[path] = img
        if len(self._cache) > self.size:
            self._cache.popitem(last=False)


def _digest(img):
    return hashlib.blake2b(to_uint8(img).tobytes(), digest_size=16).digest()


def exie_search(x: np.ndarray, target: np.ndarray, cfg: SearchConfig | None = None) -> SearchReport:
    """Search for a short operator sequence taking ``x`` close to ``target``."""
    cfg = cfg or SearchConfig()
    x = np.ascontiguousarray(x, dtype=np.float64)
    target = np.ascontiguousarray(target, dtype=np.float64)
    check_same_shape(x, target)
    t0 = time.perf_counter()

    ops = cfg.operators
    families = np.array([op.family.code for op in ops], dtype=np.int32)
    params = np.array([op.param for op in ops], dtype=np.float64)
    channels = np.array([op.channels.index for op in ops], dtype=np.int32)
    hp = KERNEL_PARAMS
    eps_log, eps_eq = cfg.heuristic.eps_log, cfg.heuristic.eps_eq
    norm = float(np.sqrt(x.size)) if cfg.normalized_distance else 1.0

    root = SearchNode((), 0, kernels.heuristic(x, target, hp, eps_log, eps_eq),
                      kernels.distance(x, target) / norm)
    open_set = OpenSet(cfg.tie_break)
    open_set.push(root)
    cache = _ImageCache(x, ops)
    seen = {_digest(x)} if cfg.dedup is Dedup.HASH else None

    best = root
    history = [(0, root.dist)]
    expanded = 0
    generated = 1
    goal = None

    while expanded < cfg.max_nodes:
        if not open_set:
            break
        node = open_set.pop_best()
        expanded += 1
        if node.dist < cfg.tau:
            goal = node
            break
        img = cache.get(node.path)
        cache.put(node.path, img)

        if seen is None:
            hs, ds = kernels.expand(img, target, families, params, channels, hp, eps_log, eps_eq)
            keep = range(len(ops))
        else:
            hs = np.empty(len(ops))
            ds = np.empty(len(ops))
            keep = []
            for k, op in enumerate(ops):
                child = apply(op, img)
                key = _digest(child)
                if key in seen:
                    continue
                seen.add(key)
                keep.append(k)
                hs[k] = kernels.heuristic(child, target, hp, eps_log, eps_eq)
                ds[k] = kernels.distance(child, target)

        g = node.g + 1
        path = node.path
        hs = hs.tolist()
        ds = (ds / norm).tolist()
        push = open_set.push
        for k in keep:
            child = SearchNode(path + (k,), g, hs[k], ds[k])
            push(child)
            if child.dist < best.dist:
                best = child
                history.append((expanded, child.dist))
        generated += len(keep)

    if goal is not None:
        chosen, reason = goal, Termination.THRESHOLD
    else:
        chosen = best
        reason = Termination.BUDGET if expanded >= cfg.max_nodes else Termination.EXHAUSTED

    result = materialize(chosen.path, x, ops)
    seq = EditSequence([ops[k] for k in chosen.path])
    report = SearchReport(
        sequence=seq,
        result_distance=distance(result, target, cfg.normalized_distance),
        input_distance=distance(x, target, cfg.normalized_distance),
        expanded=expanded,
        generated=generated,
        terminated_by=reason,
        wall_time=time.perf_counter() - t0,
        result=result,
        history=history,
    )
    log.debug("search done: %s", report.summary())
    return report
