"""Time the compiled and pure-Python orbit kernels on the same maps.

    python benchmarks/bench_backends.py [--steps 2000]

Prints seconds per 1000 iterations for each backend, the speedup, and the
largest coordinate difference between the two orbits.
"""

import argparse
import time

import numpy as np

from parabolic_shift import _backend
from parabolic_shift.halfplane import ParabolicMap
from parabolic_shift.measure import Atom, HistogramPiece, PowerTail, RealMeasure

MAPS = {
    "atoms (4)": ParabolicMap(0.7, RealMeasure([Atom(-3, 0.5), Atom(-1, 1), Atom(2, 1.5), Atom(4, 0.2)])),
    "piece": ParabolicMap(1.0, RealMeasure(pieces=[HistogramPiece(-1, 2, 0.5)])),
    "tail p=2.5": ParabolicMap(0.0, RealMeasure(tails=[PowerTail("positive", 1, 1, 2.5)])),
    "tail p=2.7": ParabolicMap(0.0, RealMeasure(tails=[PowerTail("positive", 1, 1, 2.7)])),
    "mixed": ParabolicMap(
        2.0,
        RealMeasure(
            atoms=[Atom(0, 1)],
            pieces=[HistogramPiece(-2, -1, 0.3)],
            tails=[PowerTail("negative", 2, 0.5, 3.5)],
        ),
    ),
}


def timed(kernel, fmap, steps):
    nodes, weights = fmap.quad.rule()
    t0 = time.perf_counter()
    out = kernel.iterate(
        fmap.mu.packed, fmap.beta, 0.0, 1.0, steps, nodes, weights, fmap.quad.rtol, fmap.quad.max_depth
    )
    return time.perf_counter() - t0, out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=2000)
    args = parser.parse_args()
    if _backend.compiled_kernel is None:
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation`")
    print(f"{'map':<12}{'compiled ms/1k':>16}{'python ms/1k':>14}{'speedup':>9}{'max |dz|':>11}")
    for name, fmap in MAPS.items():
        tc, oc = timed(_backend.compiled_kernel, fmap, args.steps)
        tp, op = timed(_backend.python_kernel, fmap, args.steps)
        diff = max(np.max(np.abs(oc[0] - op[0])), np.max(np.abs(oc[1] - op[1])))
        scale = 1000.0 / args.steps
        print(f"{name:<12}{1e3 * tc * scale:>16.2f}{1e3 * tp * scale:>14.2f}{tp / tc:>9.1f}{diff:>11.1e}")


if __name__ == "__main__":
    main()
