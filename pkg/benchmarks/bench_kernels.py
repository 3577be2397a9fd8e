"""Compare the compiled kernels with the NumPy fallback.

    python3 benchmarks/bench_kernels.py [--n 16384] [--repeat 7]

Prints the best-of-repeat time per call for each kernel and backend, the
speed-up, and whether both backends return bit-identical results (scalar sums
show their relative difference instead).
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from subband_error import _backend
from subband_error.cascade import decompose
from subband_error.fft_baseline import twiddles
from subband_error.filters import design_halfband_lowpass


def cases(n: int):
    rng = np.random.default_rng(0)
    x = rng.standard_normal(n)
    xl = rng.standard_normal(n) * 1e-17
    f = design_halfband_lowpass().coefficients
    tw = twiddles(n)
    zeros = np.zeros(n)
    small = np.random.default_rng(1).uniform(0.1, 1.0, 4)
    return {
        "conv_decimate": lambda k: k.conv_decimate(x, f),
        "dd_conv_decimate": lambda k: k.dd_conv_decimate(x, xl, f),
        "dd_fft": lambda k: k.dd_fft(x, xl, zeros, zeros, *tw, False),
        "f1_enumerate (N=4, z=4)": lambda k: k.f1_enumerate(small, 4, False),
        "cascade, 12 levels, extended": lambda k: decompose(x, design_halfband_lowpass(), 12, "stage", "extended", k),
    }


def same(a, b):
    if isinstance(a, float):
        # f1 sums are accumulated in a different order by the two backends
        return "yes" if a == b else f"rel {abs(a - b) / abs(a):.1e}"
    if isinstance(a, tuple):
        return all(same(u, v) for u, v in zip(a, b))
    if hasattr(a, "details"):
        return all(np.array_equal(u, v) for u, v in zip(a.details, b.details))
    return bool(np.array_equal(a, b))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2**14)
    ap.add_argument("--repeat", type=int, default=7)
    args = ap.parse_args()

    backends = [_backend.python_backend]
    if _backend.compiled_backend is None:
        print("compiled extension not built; timing the fallback only")
    else:
        backends.append(_backend.compiled_backend)

    print(f"n = {args.n}, best of {args.repeat}")
    print(f"{'kernel':<30} " + " ".join(f"{b.name + ' ms':>12}" for b in backends) + "   speed-up  identical")
    for name, fn in cases(args.n).items():
        times, results = [], []
        for b in backends:
            number = 3
            times.append(min(timeit.repeat(lambda: fn(b), number=number, repeat=args.repeat)) / number)
            results.append(fn(b))
        row = f"{name:<30} " + " ".join(f"{t * 1e3:12.3f}" for t in times)
        if len(times) == 2:
            row += f"   {times[0] / times[1]:8.1f}x  {same(*results)}"
        print(row)


if __name__ == "__main__":
    main()
