"""Compare the compiled and numpy kernels on the same seeded batches.

Prints one CSV row per (method, n, backend) with the median per-sample time
and the largest coordinate difference between the two backends. Only
stick-breaking and rejection go through the kernels; the other samplers are
plain numpy on either backend. Run it after ``pip install -e .``::

    python3 benchmarks/compare_backends.py --n-list 2,8,64,1024,4096
"""

import argparse
import csv
import sys

import numpy as np

from unisimplex import SamplerMethod, UniformSource, available_backends, sample_batch
from unisimplex.bench import measure_throughput


def parse_args(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--methods", default="stick,rejection")
    p.add_argument("--n-list", default="2,8,64,512,1024,4096")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=42)
    return p.parse_args(argv)


def max_difference(method, n, seed):
    a = sample_batch(method, n, 2000, UniformSource(seed), backend="cython")
    b = sample_batch(method, n, 2000, UniformSource(seed), backend="python")
    return float(np.max(np.abs(a - b)))


def main(argv=None):
    args = parse_args(argv)
    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernels not built; only the numpy backend is available", file=sys.stderr)
    methods = [SamplerMethod(m) for m in args.methods.split(",")]
    ns = [int(v) for v in args.n_list.split(",")]

    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["method", "n", "backend", "ns_per_sample", "speedup_vs_python", "max_abs_diff"])
    for method in methods:
        for n in ns:
            if method is SamplerMethod.REJECTION_CUBE and n > 9:
                continue  # (n-1)! trials per point
            times = {
                b: measure_throughput(method, n, repetitions=args.repeats, seed=args.seed, backend=b).seconds_per_sample
                for b in backends
            }
            diff = max_difference(method, n, args.seed) if len(backends) == 2 else float("nan")
            for b, t in times.items():
                out.writerow([method.value, n, b, f"{t * 1e9:.1f}", f"{times['python'] / t:.2f}", f"{diff:.3g}"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
