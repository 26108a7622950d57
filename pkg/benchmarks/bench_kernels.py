"""Time the compiled kernels against the numpy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--n 128] [--repeat 5]

Prints one line per kernel with the best time of each backend and the
speed-up. Also times one full reconstruction iteration with each backend.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from sbrecon.kernels import available_backends


def _inputs(n, rng):
    S = 13
    z = rng.standard_normal((S, n, n))
    w = rng.random((S, n, n))
    lam = rng.random(S)
    g = rng.standard_normal((3, n, n)) + 1j * rng.standard_normal((3, n, n))
    b = [rng.random((n, n)) + 3.0 for _ in range(3)]
    off = [0.3 * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
           for _ in range(3)]
    r = [rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) for _ in range(3)]
    cramer_args = [x.astype(complex) for x in b] + off + r
    theta = np.linspace(0, np.pi, 45, endpoint=False)
    det = np.arange(int(np.ceil(np.sqrt(2) * n))) - 0.5 * (np.ceil(np.sqrt(2) * n) - 1)
    return {
        "soft_threshold": lambda k: k.soft_threshold(z, 0.5),
        "banded_soft_threshold": lambda k: k.banded_soft_threshold(z, lam, w, 0.1),
        "group_soft_threshold": lambda k: k.group_soft_threshold(g, 0.5, (1.0, 2.0, 1.0)),
        "cramer3": lambda k: k.cramer3(*cramer_args),
        "radon_triplets": lambda k: k.radon_triplets(n, np.cos(theta), np.sin(theta), det),
    }


def _best(fn, repeat):
    number = 1
    while timeit.timeit(fn, number=number) < 0.05 and number < 1000:
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def _solver_iteration_time(n, pure):
    code = (
        "import time;"
        "from sbrecon.phantoms import make_phantom;"
        "from sbrecon.sampling import fourier_operator, make_radial_mask;"
        "from sbrecon.transforms import build_wavelet;"
        "from sbrecon.solver import SolverConfig, split_bregman_reconstruct;"
        f"img = make_phantom('texture-mix', {n});"
        f"A = fourier_operator(make_radial_mask({n}, 25));"
        f"t = build_wavelet({n}, 4, 'db2');"
        "y = A.forward(img);"
        "split_bregman_reconstruct(A, t, y, SolverConfig(max_iter=1));"
        "t0 = time.perf_counter();"
        "split_bregman_reconstruct(A, t, y, SolverConfig(max_iter=5));"
        "print((time.perf_counter() - t0) / 5)"
    )
    env = dict(os.environ, SBRECON_PURE_PYTHON="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True)
    return float(out.stdout.strip())


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--n", type=int, default=128)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-solver", action="store_true")
    args = ap.parse_args(argv)

    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernels are not built; only the numpy fallback is available")
    cases = _inputs(args.n, np.random.default_rng(0))
    print(f"{'kernel':<24}{'python (ms)':>12}{'cython (ms)':>13}{'speed-up':>10}")
    for name, call in cases.items():
        times = {b: _best(lambda k=k: call(k), args.repeat) * 1e3 for b, k in backends.items()}
        py = times["python"]
        cy = times.get("cython")
        if cy is None:
            print(f"{name:<24}{py:>12.3f}{'-':>13}{'-':>10}")
        else:
            print(f"{name:<24}{py:>12.3f}{cy:>13.3f}{py / cy:>9.1f}x")
    if not args.skip_solver:
        py = _solver_iteration_time(args.n, pure=True)
        line = f"{'solver iteration':<24}{py * 1e3:>12.1f}"
        if "cython" in backends:
            cy = _solver_iteration_time(args.n, pure=False)
            line += f"{cy * 1e3:>13.1f}{py / cy:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
