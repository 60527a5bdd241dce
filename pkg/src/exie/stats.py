"""Operator-frequency statistics over a collection of sequences."""
from __future__ import annotations

from collections import Counter

from .operators import Channels, Family, enumerate_all, group_histogram, op_histogram


def _with_frequencies(counts: Counter, total: int) -> dict:
    return {key: {"count": n, "frequency": n / total} for key, n in counts.items()}


def sequence_stats(sequences) -> dict:
    """Aggregate histograms per concrete operator and per (family, channels).

    Keys follow the canonical operator order; only operators that occur are
    listed.
    """
    per_op: Counter = Counter()
    per_group: Counter = Counter()
    lengths = []
    for seq in sequences:
        per_op.update(op_histogram(seq))
        per_group.update(group_histogram(seq))
        lengths.append(len(seq))
    total = sum(lengths)

    order = {op: i for i, op in enumerate(enumerate_all())}
    ops_sorted = sorted(per_op, key=order.__getitem__)
    groups_sorted = sorted(per_group, key=lambda k: (list(Family).index(k[0]),
                                                     list(Channels).index(k[1])))
    op_counts = Counter({str(op): per_op[op] for op in ops_sorted})
    group_counts = Counter({f"{fam.value}/{ch.value}": per_group[(fam, ch)]
                            for fam, ch in groups_sorted})
    return {
        "sequences": len(lengths),
        "total": total,
        "lengths": lengths,
        "operators": _with_frequencies(op_counts, total) if total else {},
        "groups": _with_frequencies(group_counts, total) if total else {},
    }
