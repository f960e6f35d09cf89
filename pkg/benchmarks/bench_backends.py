"""Compare the compiled and pure-Python kernels on the scaling ladder.

    python3 benchmarks/bench_backends.py [--sizes 1000 2000 ...] [--repeats 3]
"""

import argparse

from sepool import bench

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=list(bench.DEFAULT_SIZES))
    ap.add_argument("--degree", type=float, default=8.0)
    ap.add_argument("--height", type=int, default=3)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    res = bench.run(args.sizes, args.degree, args.height, args.seed, args.repeats)
    print(bench.format_table(res))
