"""Times the compiled kernels against their numpy fallbacks.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from smfading import _pykernels

try:
    from smfading import _kernels
except ImportError:
    _kernels = None


def _cases(rng):
    coef = rng.standard_normal(2000) + 1j * rng.standard_normal(2000)
    log_x = rng.uniform(-20.0, 20.0, 2000)
    yield "mb_real_sum (2000 nodes x 2000 points)", "mb_real_sum", (coef, 0.01, 0.05, log_x)

    power = rng.exponential(size=10 ** 6)
    phase = rng.uniform(0.0, 2 * np.pi, 10 ** 6)
    yield "polar_gains (1e6 gains)", "polar_gains", (power, phase)

    n, nr, nt, M = 50000, 2, 8, 4
    H = rng.standard_normal((n, nr, nt)) + 1j * rng.standard_normal((n, nr, nt))
    noise = 0.5 * (rng.standard_normal((n, nr)) + 1j * rng.standard_normal((n, nr)))
    j = np.arange(M)
    args = (H, noise, rng.integers(0, nt, n).astype(np.int64),
            rng.integers(0, M, n).astype(np.int64), np.exp(2j * np.pi * j / M),
            np.arange(nt, dtype=np.int64), (j ^ (j >> 1)).astype(np.int64))
    yield "ml_bit_errors (5e4 trials, 8x2, QPSK)", "ml_bit_errors", args


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5, help="timing repetitions (best is kept)")
    args = parser.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'kernel':<42}{'numpy [ms]':>12}{'cython [ms]':>13}{'speedup':>9}")
    for label, name, call_args in _cases(rng):
        py = min(timeit.repeat(lambda: getattr(_pykernels, name)(*call_args),
                               number=1, repeat=args.repeat))
        if _kernels is None:
            print(f"{label:<42}{py * 1e3:>12.2f}{'n/a':>13}{'':>9}")
            continue
        cy = min(timeit.repeat(lambda: getattr(_kernels, name)(*call_args),
                               number=1, repeat=args.repeat))
        print(f"{label:<42}{py * 1e3:>12.2f}{cy * 1e3:>13.2f}{py / cy:>8.1f}x")


if __name__ == "__main__":
    main()
