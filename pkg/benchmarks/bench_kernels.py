"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--size 32] [--repeat 20] [--nodes 2000]

Times operator application, the heuristic, the fused 32-child expansion and
a full search on a random pair, once per importable backend.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from exie import kernels
from exie.heuristic import KERNEL_PARAMS
from exie.operators import enumerate_all
from exie.search import SearchConfig, exie_search


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_backend(mod, x, y, repeat, nodes):
    ops = enumerate_all()
    fam = np.array([op.family.code for op in ops], dtype=np.int32)
    par = np.array([op.param for op in ops])
    chan = np.array([op.channels.index for op in ops], dtype=np.int32)
    res = {
        "apply (gamma)": best_of(lambda: mod.apply_op(x, mod.GAMMA, 0.6, mod.ALL_CHANNELS), repeat),
        "heuristic": best_of(lambda: mod.heuristic(x, y, KERNEL_PARAMS, 1e-4, 1e-9), repeat),
        "expand (32 children)": best_of(
            lambda: mod.expand(x, y, fam, par, chan, KERNEL_PARAMS, 1e-4, 1e-9), repeat),
    }
    # the search resolves kernels through exie.kernels; swap the module in
    saved = {name: getattr(kernels, name) for name in ("apply_op", "distance", "heuristic", "expand")}
    try:
        for name in saved:
            setattr(kernels, name, getattr(mod, name))
        t0 = time.perf_counter()
        rep = exie_search(x, y, SearchConfig(tau=0.0, max_nodes=nodes))
        res[f"search ({rep.expanded} nodes)"] = time.perf_counter() - t0
    finally:
        for name, fn in saved.items():
            setattr(kernels, name, fn)
    return res


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--size", type=int, default=32)
    p.add_argument("--repeat", type=int, default=20)
    p.add_argument("--nodes", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    x = rng.uniform(0, 1, (args.size, args.size, 3))
    y = rng.uniform(0, 1, (args.size, args.size, 3))
    backends = kernels.available_backends()
    results = {name: bench_backend(mod, x, y, args.repeat, args.nodes) for name, mod in backends.items()}

    names = sorted(results)
    rows = list(results[names[0]])
    print(f"{args.size}x{args.size} image, best of {args.repeat}")
    print(f"{'kernel':<24}" + "".join(f"{n:>14}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for row in rows:
        cells = [results[n][row] for n in names]
        line = f"{row:<24}" + "".join(f"{c * 1e3:>11.3f} ms" for c in cells)
        if len(names) == 2 and "cython" in results:
            line += f"{results['python'][row] / results['cython'][row]:>11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
