"""Time the compiled and numpy enumeration kernels on the same instances.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--seed S]
"""

import argparse
import math
import time

import numpy as np

from ambiguity_lab import _kernels_py
from ambiguity_lab.oracles import _powtab, permutation_ranks
from ambiguity_lab.pmf import random_joint

try:
    from ambiguity_lab import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def rank_case(rng, x_size, y_size):
    j = random_joint(rng, x_size, y_size, zero_prob=0.0)
    xs, ys = np.nonzero(j.mass)
    cells = ys.astype(np.int32)
    args = (permutation_ranks(x_size), y_size, xs.astype(np.int32), cells, cells,
            j.mass[xs, ys], _powtab(x_size, 1.0))
    return f"rank tables |X|={x_size} cells={y_size}", "enum_rank_tables", args, \
        math.factorial(x_size) ** y_size


def function_case(rng, kernel, x_size, y_size, values):
    j = random_joint(rng, x_size, y_size, zero_prob=0.0)
    xs, ys = np.nonzero(j.mass)
    w = j.mass[xs, ys]
    order = np.lexsort((xs, -w, ys))
    args = (ys[order].astype(np.int32), w[order], values, y_size, _powtab(x_size, 1.0))
    label = "list maps" if kernel == "enum_list_functions" else "side-info maps"
    return f"{label} points={xs.size} values={values}", kernel, args, values**xs.size


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), result


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    cases = [
        rank_case(rng, 5, 2),
        rank_case(rng, 6, 2),
        function_case(rng, "enum_list_functions", 5, 2, 3),
        function_case(rng, "enum_sideinfo_functions", 5, 2, 3),
    ]
    print(f"{'case':<36}{'configs':>10}{'cython s':>11}{'numpy s':>11}{'speedup':>9}")
    for label, name, kargs, total in cases:
        t_py, r_py = best_time(lambda: getattr(_kernels_py, name)(*kargs, 0, total), args.repeat)
        if _kernels_c is None:
            print(f"{label:<36}{total:>10}{'n/a':>11}{t_py:>11.4f}{'':>9}")
            continue
        t_c, r_c = best_time(lambda: getattr(_kernels_c, name)(*kargs, 0, total), args.repeat)
        assert r_c[1] == r_py[1] and math.isclose(r_c[0], r_py[0], rel_tol=1e-12)
        print(f"{label:<36}{total:>10}{t_c:>11.4f}{t_py:>11.4f}{t_py / t_c:>8.1f}x")


if __name__ == "__main__":
    main()
