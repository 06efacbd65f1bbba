"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel runs on the same inputs under both backends; outputs are
checked for agreement before timings are reported.
"""
import argparse
import timeit

import numpy as np

from glottkit import _kernels_py

try:
    from glottkit import _kernels
except ImportError:
    _kernels = None


def cases(rng):
    x = rng.standard_normal(16000)
    r = np.correlate(x[:400], x[:400], "full")[399:399 + 19]
    a = np.real(np.poly(np.r_[0.97 * np.exp(1j * np.linspace(0.2, 2.8, 9)),
                              0.97 * np.exp(-1j * np.linspace(0.2, 2.8, 9))]))
    roots = 0.9 * np.exp(1j * rng.uniform(-np.pi, np.pi, 300))
    mask = rng.random(4096) > 0.4
    return {
        "levinson(order 18)": ("levinson", (r, 18)),
        "allpole(16000, p=18)": ("allpole", (x, a, 1.0)),
        "allzero(16000, p=18)": ("allzero", (x, a, 1.0)),
        "leaky_integrate(16000)": ("leaky_integrate", (x, 0.99)),
        "root_power_sums(300 roots, 32)": ("root_power_sums", (roots, 32)),
        "run_lengths_circular(4096)": ("run_lengths_circular", (mask,)),
    }


def agree(a, b):
    if isinstance(a, tuple):
        return all(agree(x, y) for x, y in zip(a, b))
    return np.allclose(np.asarray(a, dtype=float), np.asarray(b, dtype=float),
                       rtol=1e-8, atol=1e-10)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled extension not built; only the Python backend is available")
        return 1
    rng = np.random.default_rng(0)
    print("%-32s %12s %12s %8s" % ("kernel", "python (us)", "compiled (us)", "speedup"))
    for label, (name, argv) in cases(rng).items():
        fp, fc = getattr(_kernels_py, name), getattr(_kernels, name)
        if not agree(fp(*argv), fc(*argv)):
            raise SystemExit("backends disagree on %s" % name)
        times = []
        for fn in (fp, fc):
            t = timeit.Timer(lambda: fn(*argv))
            n, _ = t.autorange()
            times.append(min(t.repeat(args.repeat, n)) / n * 1e6)
        print("%-32s %12.1f %12.1f %7.1fx" % (label, times[0], times[1], times[0] / times[1]))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
