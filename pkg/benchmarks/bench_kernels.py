"""Benchmark the jitted kernels against the pure-numpy fallback.

Times the three hot operations on realistic inputs: full episode rollouts on
the bundled desk tileset, constraint propagation from a single collapse, and
the grid measurements used by the objectives. Run as:

    python benchmarks/bench_kernels.py [--repeats N] [--dims RxC]

The numba column includes a warm-up call, so jit compilation is not counted.
"""

import argparse
import time

import numpy as np

from wfcmdp.backend import available_backends
from wfcmdp.kernels import get_kernels
from wfcmdp.tileset import load_desk_tileset


def _time(fn, repeats):
    fn()  # warm-up (jit compile / cache load)
    start = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - start) / repeats


def bench(dims, repeats):
    ts = load_desk_tileset()
    rows, cols = dims
    rng = np.random.default_rng(0)
    actions = [rng.random((rows * cols, ts.n_tiles)) for _ in range(repeats)]
    masks = [rng.random((rows, cols)) < 0.45 for _ in range(repeats)]

    cases = {}
    for name in available_backends():
        kernels = get_kernels(name)

        def roll(k=kernels):
            for a in actions[:1]:
                k.run_rollout(a, False, ts.allowed, rows, cols)

        def prop(k=kernels):
            cands = np.ones((rows, cols, ts.n_tiles), bool)
            counts = np.full((rows, cols), ts.n_tiles, np.int16)
            cands[rows // 2, cols // 2, :] = False
            cands[rows // 2, cols // 2, 0] = True
            counts[rows // 2, cols // 2] = 1
            k.propagate(cands, counts, ts.allowed, rows // 2, cols // 2)

        def diameter(k=kernels):
            for m in masks[:1]:
                k.grid_diameter(m)

        def components(k=kernels):
            for m in masks[:1]:
                k.count_components(m)

        cases[name] = {
            "rollout": _time(roll, repeats),
            "propagate": _time(prop, repeats),
            "grid_diameter": _time(diameter, repeats),
            "count_components": _time(components, repeats),
        }
    return cases


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=50)
    parser.add_argument("--dims", default="20x20")
    args = parser.parse_args()
    rows, cols = (int(v) for v in args.dims.lower().split("x"))

    cases = bench((rows, cols), args.repeats)
    flavors = list(cases)
    print(f"kernel timings at {rows}x{cols}, mean of {args.repeats} runs")
    header = f"{'operation':<18}" + "".join(f"{f:>12}" for f in flavors)
    if len(flavors) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for op in ("rollout", "propagate", "grid_diameter", "count_components"):
        row = f"{op:<18}"
        for f in flavors:
            row += f"{cases[f][op] * 1e3:>10.3f}ms"
        if len(flavors) == 2:
            a, b = (cases[f][op] for f in flavors)
            slow, fast = max(a, b), min(a, b)
            row += f"{slow / fast:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
