"""Benchmark the JIT kernels against the pure-numpy fallback.

Run:
    python benchmarks/bench_kernels.py [--budget 64] [--repeat 5]

The same workloads run through both implementations; the env flag
LQFRAMES_NUMBA only affects which one the library picks at import time,
so this script calls both explicitly.
"""

import argparse
import time

import numpy as np

from lqframes import _kernels
from lqframes import estimate_rip, random_tight_frame


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_powsum(repeat):
    rng = np.random.default_rng(0)
    rows = []
    for size, label, loops in ((2_000_000, "2e6", 1), (110, "110", 20000)):
        x = rng.standard_normal(size)
        for name, fn in (("numpy", _kernels.lq_powsum_numpy),) + (
            (("numba", _kernels.lq_powsum_numba),) if _kernels.NUMBA_ENABLED else ()
        ):
            fn(x, 0.7)  # warm up / compile
            def run(fn=fn, x=x, loops=loops):
                for _ in range(loops):
                    fn(x, 0.7)
            rows.append((f"lq_powsum[{label}]x{loops} {name}", _time(run, repeat)))
    return rows


def bench_rip_scan(repeat):
    # the estimator calls this once per support: small direction blocks,
    # many invocations
    rng = np.random.default_rng(1)
    ad_s = rng.standard_normal((40, 6))
    d_s = rng.standard_normal((64, 6))
    dirs = rng.standard_normal((6, 40))
    calls = 2000
    rows = []
    for name, fn in (("numpy", _kernels.rip_scan_numpy),) + (
        (("numba", _kernels.rip_scan_numba),) if _kernels.NUMBA_ENABLED else ()
    ):
        fn(ad_s, d_s, dirs, 0.7)
        def run(fn=fn):
            for _ in range(calls):
                fn(ad_s, d_s, dirs, 0.7)
        rows.append((f"rip_scan[6x40]x{calls} {name}", _time(run, repeat)))
    return rows


def bench_estimate_rip(budget, repeat):
    # end-to-end: sampled estimation on a moderately sized instance
    rng = np.random.default_rng(2)
    D = random_tight_frame(64, 80, 3)
    A = rng.standard_normal((40, 64))
    def run():
        estimate_rip(A, D.matrix, 0.7, 6, mode="sampled", budget=budget, seed=0,
                     directions_per_support=64)
    run()
    return [(f"estimate_rip[budget={budget}] active path", _time(run, repeat))]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--budget", type=int, default=256)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    print(f"numba available and enabled: {_kernels.NUMBA_ENABLED}")
    rows = bench_powsum(args.repeat) + bench_rip_scan(args.repeat) + bench_estimate_rip(
        args.budget, args.repeat
    )
    width = max(len(name) for name, _ in rows)
    for name, seconds in rows:
        print(f"{name:<{width}}  {seconds * 1e3:9.3f} ms")


if __name__ == "__main__":
    main()
