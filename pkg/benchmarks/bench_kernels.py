"""Compare the compiled and numpy gate kernels.

Run with ``python3 benchmarks/bench_kernels.py [--qubits 4 8 12 16] [--repeat 200]``.
Prints microseconds per kernel call for each backend and the speedup, plus
end-to-end QFT runtimes through the interpreter.
"""

import argparse
import math
import timeit

import numpy as np

from qsubtest.benchsuite.programs import qft
from qsubtest.qir import bind_layout, run
from qsubtest.simcore import _backend

H = 1 / math.sqrt(2)


def _amps(n, rng):
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return np.ascontiguousarray(v / np.linalg.norm(v))


def kernel_calls(k, n):
    top = 1 << (n - 1)
    ctl = 1 << 0
    return {
        "apply_1q": lambda a: k.apply_1q(a, top, H, H, H, -H, 0, 0),
        "apply_1q ctl": lambda a: k.apply_1q(a, top, H, H, H, -H, ctl, ctl),
        "apply_swap": lambda a: k.apply_swap(a, top, 1, 0, 0),
        "apply_phase": lambda a: k.apply_phase(a, top, 1j, 0, 0),
    }


def bench_kernels(sizes, repeat):
    rng = np.random.default_rng(0)
    backends = {"python": _backend.python_kernels}
    if _backend.compiled_kernels is not None:
        backends["cython"] = _backend.compiled_kernels
    print(f"{'kernel':<14}{'n':>4}" + "".join(f"{b + ' us':>14}" for b in backends) + f"{'speedup':>10}")
    for n in sizes:
        amps = _amps(n, rng)
        names = kernel_calls(_backend.python_kernels, n)
        for name in names:
            times = {}
            for b, k in backends.items():
                fn = kernel_calls(k, n)[name]
                fn(amps)
                times[b] = min(timeit.repeat(lambda: fn(amps), number=repeat, repeat=3)) / repeat * 1e6
            speed = times["python"] / times["cython"] if "cython" in times else float("nan")
            print(f"{name:<14}{n:>4}" + "".join(f"{times[b]:>14.2f}" for b in backends) + f"{speed:>10.1f}")


def bench_qft(sizes, repeat):
    sub = qft()
    rng = np.random.default_rng(0)
    print(f"\n{'QFT run':<14}{'n':>4}{'python ms':>14}{'cython ms':>14}{'speedup':>10}")
    for n in sizes:
        layout = bind_layout(sub, lengths={"qs": n})
        times = {}
        for b in ("python", "cython"):
            if b == "cython" and _backend.compiled_kernels is None:
                continue
            prev = _backend.use_backend(b)
            try:
                times[b] = min(timeit.repeat(lambda: run(sub, layout, rng), number=repeat, repeat=3)) / repeat * 1e3
            finally:
                _backend.use_backend(prev)
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{'':<14}{n:>4}{times['python']:>14.3f}{times.get('cython', float('nan')):>14.3f}{speed:>10.1f}")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--qubits", type=int, nargs="+", default=[4, 8, 12, 16])
    p.add_argument("--repeat", type=int, default=200)
    args = p.parse_args()
    print(f"active backend: {_backend.BACKEND}")
    bench_kernels(args.qubits, args.repeat)
    bench_qft([n for n in args.qubits if n <= 12], max(1, args.repeat // 20))


if __name__ == "__main__":
    main()
