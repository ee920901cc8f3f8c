"""Compare the compiled and pure-Python edge-subset kernels.

Runs the raw kernel on Form-like sibling sets of growing size, then times a
whole finder run in a subprocess per backend (the backend is picked at import
time, so ``PBGT_PURE_PYTHON`` must be set before ``pbgt`` loads).

    python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

from pbgt import _kernels_py

try:
    from pbgt import _speedups
except ImportError:
    _speedups = None

FINDER_SNIPPET = (
    "from pbgt import Scope, enumerate_instances, kernels;"
    "import time;t=time.perf_counter();"
    "n=len(enumerate_instances(Scope(max_behaviour=4,max_group=1,max_connector=3)));"
    "print(kernels.BACKEND, n, time.perf_counter()-t)"
)


def sibling_problem(n_nodes: int):
    """Init is node 0 and End the last node; every ordered pair except into Init or out of End."""
    end = n_nodes - 1
    pairs = [(a, b) for a in range(n_nodes) for b in range(n_nodes)
             if a != b and b != 0 and a != end and (a, b) != (0, end)]
    return n_nodes, pairs, n_nodes, 0, end


def best_of(fn, repeat: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_kernel(repeat: int) -> None:
    print(f"{'nodes':>5} {'pairs':>5} {'subsets':>8} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for n in (4, 5, 6):
        args = sibling_problem(n)
        expected = _kernels_py.edge_subsets(*args)
        py = best_of(lambda: _kernels_py.edge_subsets(*args), repeat)
        if _speedups is None:
            print(f"{n:>5} {len(args[1]):>5} {len(expected[0]):>8} {py:>10.4f} {'n/a':>11} {'n/a':>8}")
            continue
        assert _speedups.edge_subsets(*args) == expected
        fast = best_of(lambda: _speedups.edge_subsets(*args), repeat)
        print(f"{n:>5} {len(args[1]):>5} {len(expected[0]):>8} {py:>10.4f} {fast:>11.4f} {py / fast:>7.1f}x")


def bench_finder() -> None:
    print("\nfinder, scope behaviour=4 group=1 connector=3:")
    for pure in (False, True):
        env = dict(os.environ)
        env.pop("PBGT_PURE_PYTHON", None)
        if pure:
            env["PBGT_PURE_PYTHON"] = "1"
        out = subprocess.run([sys.executable, "-c", FINDER_SNIPPET], env=env, capture_output=True,
                             text=True, check=True).stdout.split()
        print(f"  {out[0]:>8}: {out[1]} instances in {float(out[2]):.3f} s")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3, help="timing repetitions, best one is reported")
    args = parser.parse_args()
    bench_kernel(args.repeat)
    bench_finder()


if __name__ == "__main__":
    main()
